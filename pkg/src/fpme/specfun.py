"""Real-argument special functions used by every other module.

Provides the Euler Gamma function, Pochhammer symbols, the Gauss
hypergeometric function 2F1 for real argument x < 1 (plus the convergent
boundary point x = 1), and Bessel J_nu / modified Bessel K_nu.

The 2F1 evaluator stitches together the classical regimes:

* direct power series on the central band |x| <= 0.87;
* the Gauss summation at x = 1 (when the series converges there);
* the 1-x connection formula on (0.87, 1);
* the Pfaff transformation x -> x/(x-1) on (-8, -0.87];
* the 1/x connection formula on (-inf, -8].

Polynomial cases (a or b a non-positive integer) and the elementary
binomial cases (a == c or b == c) short-circuit the transformations.
Integer parameter differences, where a connection formula degenerates,
fall back to a Richardson-extrapolated parameter nudge.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy import special as _sp

from ._errors import ParameterError, PoleError

_INT_TOL = 1e-12
_SERIES_REL = 1e-17
_SERIES_MAX_TERMS = 10_000

__all__ = [
    "Hyper2F1Spec",
    "BesselOrder",
    "gamma",
    "rgamma",
    "pochhammer",
    "hyp2f1",
    "hyper2f1",
    "hyper2f1_derivative",
    "bessel",
    "bessel_j",
    "bessel_k",
    "bessel_j_zeros",
]


def _nonpos_int(x: float) -> bool:
    return x < 0.5 and abs(x - round(x)) < _INT_TOL and round(x) <= 0


def gamma(x: float) -> float:
    """Gamma(x) for real x away from the poles at 0, -1, -2, ..."""
    if _nonpos_int(x):
        raise PoleError(f"gamma pole at x = {x}")
    return math.gamma(x)


def rgamma(x: float) -> float:
    """1/Gamma(x), defined as 0 at the poles of Gamma."""
    if _nonpos_int(x):
        return 0.0
    return 1.0 / math.gamma(x)


def pochhammer(a: float, n: int) -> float:
    """Rising factorial (a)_n = a (a+1) ... (a+n-1), with (a)_0 = 1."""
    if n < 0:
        raise ParameterError("pochhammer order must be >= 0")
    out = 1.0
    for i in range(n):
        out *= a + i
    return out


# ---------------------------------------------------------------------------
# Gauss hypergeometric function
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Hyper2F1Spec:
    """Parameter triple (a, b; c) of a Gauss hypergeometric function.

    ``domain`` tags the intended argument range: "unit-disk" for
    0 <= x < 1 arguments (plus the convergent boundary x = 1) and
    "negative-axis" for x <= 0 of any magnitude.
    """

    a: float
    b: float
    c: float
    domain: str = "negative-axis"

    def __post_init__(self):
        if self.domain not in ("unit-disk", "negative-axis"):
            raise ParameterError(f"unknown domain tag {self.domain!r}")
        if _nonpos_int(self.c):
            na = -round(self.a) if _nonpos_int(self.a) else None
            nb = -round(self.b) if _nonpos_int(self.b) else None
            nc = -round(self.c)
            if not any(n is not None and n < nc for n in (na, nb)):
                raise ParameterError(
                    "c is a non-positive integer not cancelled by a "
                    "polynomial case"
                )


def _series(a: float, b: float, c: float, x: float) -> float:
    """Direct power series, |x| < 1.

    Terminates when the term magnitude stays below 1e-17 times the
    running sum for 3 consecutive terms (cap 10 000 terms).
    """
    term = 1.0
    terms = [1.0]
    small = 0
    for n in range(_SERIES_MAX_TERMS):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * x
        terms.append(term)
        if abs(term) < _SERIES_REL * abs(math.fsum(terms)):
            small += 1
            if small >= 3:
                break
        else:
            small = 0
    return math.fsum(terms)


def _polynomial(n: int, b: float, c: float, x: float) -> float:
    term = 1.0
    terms = [1.0]
    for k in range(n):
        term *= (-n + k) * (b + k) / ((c + k) * (k + 1)) * x
        terms.append(term)
    return math.fsum(terms)


def _gauss_at_one(a: float, b: float, c: float) -> float:
    if c - a - b <= 0:
        raise ParameterError(
            "2F1 series diverges at x = 1 unless c - a - b > 0"
        )
    return gamma(c) * gamma(c - a - b) * rgamma(c - a) * rgamma(c - b)


def _near_one(a: float, b: float, c: float, x: float) -> float:
    """Connection formula in powers of 1 - x (c - a - b not an integer)."""
    u = 1.0 - x
    s = c - a - b
    t1 = gamma(c) * rgamma(c - a) * rgamma(c - b)
    t2 = gamma(c) * rgamma(a) * rgamma(b)
    return (
        t1 * gamma(s) * _series(a, b, 1.0 - s, u)
        + t2 * gamma(-s) * u**s * _series(c - a, c - b, 1.0 + s, u)
    )


def _large_negative(a: float, b: float, c: float, x: float) -> float:
    """Connection formula in powers of 1/x (b - a not an integer)."""
    w = 1.0 / x
    t1 = gamma(c) * gamma(b - a) * rgamma(b) * rgamma(c - a)
    t2 = gamma(c) * gamma(a - b) * rgamma(a) * rgamma(c - b)
    out = 0.0
    if t1 != 0.0:
        out += t1 * (-x) ** (-a) * _series(a, a - c + 1.0, a - b + 1.0, w)
    if t2 != 0.0:
        out += t2 * (-x) ** (-b) * _series(b, b - c + 1.0, b - a + 1.0, w)
    return out


def _pfaff(a: float, b: float, c: float, x: float) -> float:
    """Pfaff transformation onto w = x/(x-1) in [0, 1).

    The exposed exponent is chosen so the inner series has the less
    negative second parameter, which keeps its alternation shallow.
    """
    w = x / (x - 1.0)
    if c - b >= c - a:
        ea, eb = a, b
    else:
        ea, eb = b, a
    return (1.0 - x) ** (-ea) * _series(ea, c - eb, c, w)


def _nudged(f, a: float, b: float, c: float, x: float, which: str) -> float:
    """Richardson-extrapolated parameter nudge for degenerate (integer
    parameter difference) connection cases."""
    warnings.warn(
        "2F1 connection formula degenerates (integer parameter "
        "difference); using a nudged evaluation",
        RuntimeWarning,
        stacklevel=3,
    )
    d = 1e-5

    def at(eps):
        if which == "b":
            return 0.5 * (f(a, b + eps, c, x) + f(a, b - eps, c, x))
        return 0.5 * (f(a, b, c + eps, x) + f(a, b, c - eps, x))

    a1, a2 = at(d), at(d / 2)
    return (4.0 * a2 - a1) / 3.0


def hyp2f1(a: float, b: float, c: float, x: float) -> float:
    """Gauss 2F1(a, b; c; x) for real parameters and real x <= 1.

    x = 1 is admitted only where the series converges there
    (c - a - b > 0), via the Gauss summation.
    """
    if x > 1.0:
        raise ParameterError("2F1 argument must satisfy x <= 1")
    if a == 0.0 or b == 0.0:
        return 1.0
    # binomial shortcuts first: exact even where the expanded polynomial
    # would cancel catastrophically
    if abs(b - c) < _INT_TOL:
        return (1.0 - x) ** (-a)
    if abs(a - c) < _INT_TOL:
        return (1.0 - x) ** (-b)
    if _nonpos_int(a) or _nonpos_int(b):
        if _nonpos_int(a) and _nonpos_int(b):
            n = min(-round(a), -round(b))
            other = b if -round(a) <= -round(b) else a
        elif _nonpos_int(a):
            n, other = -round(a), b
        else:
            n, other = -round(b), a
        return _polynomial(n, other, c, x)
    if _nonpos_int(c):
        raise ParameterError(
            "c is a non-positive integer not cancelled by a polynomial case"
        )
    if x == 0.0:
        return 1.0
    if x == 1.0:
        return _gauss_at_one(a, b, c)
    if abs(x) <= 0.87:
        return _series(a, b, c, x)
    if x > 0.87:
        if abs((c - a - b) - round(c - a - b)) < _INT_TOL:
            return _nudged(hyp2f1, a, b, c, x, "c")
        return _near_one(a, b, c, x)
    if x > -8.0:
        return _pfaff(a, b, c, x)
    if abs((b - a) - round(b - a)) < _INT_TOL:
        return _nudged(hyp2f1, a, b, c, x, "b")
    return _large_negative(a, b, c, x)


def hyper2f1(spec: Hyper2F1Spec, x: float) -> float:
    """Evaluate 2F1 under a domain-tagged parameter spec."""
    if spec.domain == "unit-disk":
        if not -1.0 < x <= 1.0:
            raise ParameterError(
                f"unit-disk argument must satisfy |x| < 1 (or x = 1 where "
                f"convergent), got {x}"
            )
    else:
        if x > 0.0:
            raise ParameterError(
                f"negative-axis argument must satisfy x <= 0, got {x}"
            )
    return hyp2f1(spec.a, spec.b, spec.c, x)


def hyper2f1_derivative(spec: Hyper2F1Spec, x: float) -> float:
    """d/dx 2F1(a, b; c; x) = (a b / c) 2F1(a+1, b+1; c+1; x)."""
    shifted = Hyper2F1Spec(spec.a + 1.0, spec.b + 1.0, spec.c + 1.0,
                           spec.domain)
    return spec.a * spec.b / spec.c * hyper2f1(shifted, x)


# ---------------------------------------------------------------------------
# Bessel functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BesselOrder:
    """Order nu plus a kind tag: first-kind J or modified second-kind K."""

    nu: float
    kind: str = "J"

    def __post_init__(self):
        if self.kind not in ("J", "K"):
            raise ParameterError(f"unknown Bessel kind {self.kind!r}")


def bessel(order: BesselOrder, x: float) -> float:
    """J_nu(x) or K_nu(x) for x > 0.

    K is even in nu; J requires nu >= 0 here so the value is finite at
    the origin.
    """
    if x <= 0.0:
        raise ParameterError("bessel argument must be positive")
    if order.kind == "J":
        if order.nu < 0.0:
            raise ParameterError("first-kind order must be >= 0")
        return float(_sp.jv(order.nu, x))
    return float(_sp.kv(order.nu, x))


def bessel_j(nu: float, x: float) -> float:
    return bessel(BesselOrder(nu, "J"), x)


def bessel_k(nu: float, x: float) -> float:
    return bessel(BesselOrder(nu, "K"), x)


def bessel_j_zeros(nu: float, count: int):
    """First ``count`` positive zeros of J_nu, nu > -1.

    McMahon's expansion seeded Newton iteration; accurate to machine
    precision for the orders used here (|nu| a few tens at most).
    """
    import numpy as np

    if count <= 0:
        return np.empty(0)
    k = np.arange(1, count + 1, dtype=float)
    beta = (k + 0.5 * nu - 0.25) * math.pi
    mu = 4.0 * nu * nu
    z = beta - (mu - 1.0) / (8.0 * beta) * (
        1.0 + (4.0 / 3.0) * (mu - 7.0) / ((8.0 * beta) ** 2)
    )
    z = np.maximum(z, 1e-3)
    for _ in range(3):
        f = _sp.jv(nu, z)
        fp = _sp.jvp(nu, z)
        step = np.where(fp != 0.0, f / np.where(fp != 0.0, fp, 1.0), 0.0)
        z = z - step
    return z
