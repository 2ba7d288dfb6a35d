"""The explicit self-similar solution families.

Six families are exposed, tagged by short strings:

``fpme1-mc``
    mass-conserving solutions of u_t + (-Delta)^s u^m = 0 with
    m = (N+2-2s)/(N+2s);
``fpme1-ext``
    finite-time-extinction solutions, m = (N-2s)/(N+2s) < m_c;
``fpme1-im``
    infinite-mass solutions, m = (N-2s)/(N+2s-2) (empty for N = 1);
``fpme3-mc``
    mass-conserving solutions of u_t = div(u^{m-1} grad (-Delta)^{-s} u)
    with m = (N+6s-2)/(N+2s);
``vss-ext`` and ``vss-grow``
    separated-variables solutions with a power-law spatial factor, for a
    caller-chosen m inside the fast-diffusion windows.

A solution is immutable: ``make_family`` fills the exponents,
``fix_constants`` pins amplitude and scale from a mass or radius
normalization, ``evaluate`` is the space-time formula.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from ._errors import ParameterError
from .fraclap import RadialProfile, _power_law_frac_lap
from .specfun import gamma

__all__ = [
    "FAMILIES",
    "SelfSimilarSolution",
    "make_family",
    "fix_constants",
    "mass",
    "evaluate",
    "profile",
    "spatial_profile",
    "to_json",
    "from_json",
]

FAMILIES = ("fpme1-mc", "fpme1-ext", "fpme1-im", "fpme3-mc",
            "vss-ext", "vss-grow")

_FORWARD = ("fpme1-mc", "fpme1-im", "fpme3-mc", "vss-grow")


@dataclass(frozen=True)
class SelfSimilarSolution:
    """Family tag plus exponents; lam/R stay None until constants are
    fixed.

    Forward families follow u(x, t) = lam t^{-alpha} profile(x t^{-beta});
    extinction-type families follow u(x, t) = lam (T-t)^{alpha}
    profile(x), with the extinction time stored in ``anchor``.
    """

    family: str
    N: int
    s: float
    m: float
    q: float
    alpha: float
    beta: float
    lam: float | None = None
    R: float | None = None
    anchor: float = 0.0

    def critical_m(self) -> float:
        return max(self.N - 2.0 * self.s, 0.0) / self.N


def _require(cond: bool, msg: str):
    if not cond:
        raise ParameterError(msg)


def make_family(family: str, N: int, s: float,
                m: float | None = None) -> SelfSimilarSolution:
    """Fill the exponent set of a family at (N, s).

    ``m`` is accepted (and required) only for the separated-variables
    families, whose nonlinearity is free inside a window.
    """
    _require(family in FAMILIES, f"unknown family {family!r}")
    _require(0.0 < s < 1.0, "order must satisfy 0 < s < 1")
    _require(N >= 1, "dimension must be >= 1")
    if family not in ("vss-ext", "vss-grow") and m is not None:
        raise ParameterError(f"family {family!r} determines m from (N, s)")

    if family == "fpme1-mc":
        mm = (N + 2.0 - 2.0 * s) / (N + 2.0 * s)
        beta = 1.0 / (N * (mm - 1.0) + 2.0 * s)
        return SelfSimilarSolution(family, N, s, mm, N / 2.0 + s,
                                   N * beta, beta)
    if family == "fpme1-ext":
        _require(N > 2.0 * s, "extinction family requires N > 2s so m > 0")
        mm = (N - 2.0 * s) / (N + 2.0 * s)
        alpha = (N + 2.0 * s) / (4.0 * s)
        return SelfSimilarSolution(family, N, s, mm, N / 2.0 + s,
                                   alpha, 0.0, anchor=1.0)
    if family == "fpme1-im":
        _require(N + 2.0 * s - 2.0 > 0.0,
                 "infinite-mass family requires N + 2s > 2")
        mm = (N - 2.0 * s) / (N + 2.0 * s - 2.0)
        _require(mm > 0.0,
                 "infinite-mass family requires m > 0 (empty for N = 1)")
        alpha = (N + 2.0 * s - 2.0) / (2.0 * (1.0 - s))
        beta = 1.0 / (2.0 * (1.0 - s))
        return SelfSimilarSolution(family, N, s, mm, N / 2.0 + s - 1.0,
                                   alpha, beta)
    if family == "fpme3-mc":
        mm = (N + 6.0 * s - 2.0) / (N + 2.0 * s)
        _require(mm > 0.0, "requires N + 6s > 2 so m > 0")
        beta = 1.0 / (N * (mm - 1.0) + 2.0 - 2.0 * s)
        return SelfSimilarSolution(family, N, s, mm, N / 2.0 + s,
                                   N * beta, beta)

    # separated-variables families: m is a free parameter in a window
    _require(m is not None, f"family {family!r} needs an explicit m")
    mc = max(N - 2.0 * s, 0.0) / N
    q = s / (1.0 - m)
    if family == "vss-ext":
        _require(0.0 < m < mc, f"requires 0 < m < m_c = {mc}")
        return SelfSimilarSolution(family, N, s, m, q,
                                   1.0 / (1.0 - m), 0.0, anchor=1.0)
    _require(mc < m < N / (N + 2.0),
             f"requires m_c = {mc} < m < N/(N+2) = {N / (N + 2.0)}")
    return SelfSimilarSolution(family, N, s, m, q,
                               -1.0 / (1.0 - m), 0.0)


def _constraint_constant(sol: SelfSimilarSolution):
    """Family algebraic constraint lam^{1-m} R^rho = K; returns (rho, K)."""
    N, s = sol.N, sol.s
    if sol.family == "fpme1-mc":
        K = (2.0 ** (2 * s - 1) * gamma(N / 2.0 + s)
             / gamma(N / 2.0 + 1.0 - s)) / sol.beta
        return 2.0 - 2.0 * s, K
    if sol.family == "fpme3-mc":
        K = (2.0 ** (1.0 - 2.0 * s) * gamma(N / 2.0 + 1.0 - s)
             / gamma(N / 2.0 + s)) / sol.beta
        return 2.0 * s, K
    if sol.family == "fpme1-ext":
        # amplitude balance of the extinction profile: lam^{1-m} R^{-2s}
        # = (4^s/alpha) Gamma(N/2+s)/Gamma(N/2-s) (forced by requiring a
        # vanishing residual; see the elementary-exponent identity)
        K = (4.0**s / sol.alpha) * gamma(N / 2.0 + s) / gamma(N / 2.0 - s)
        return -2.0 * s, K
    if sol.family == "fpme1-im":
        K = (4.0**s / sol.alpha) * gamma(N / 2.0 + s) / gamma(N / 2.0 - s)
        return 2.0 - 2.0 * s, K
    raise ParameterError(f"no algebraic constraint for {sol.family!r}")


def _mass_coefficient(N: int, s: float) -> float:
    return math.pi ** (N / 2.0) * gamma(s) / gamma(N / 2.0 + s)


def _vss_amplitude(sol: SelfSimilarSolution) -> float:
    """Amplitude of the separated-variables solution.

    Obtained by forcing the pointwise residual of u = C theta(t)
    |x|^{-2q} to vanish; the spatial operator value comes from the
    numeric power-law evaluation, not from any closed form.
    """
    from scipy.optimize import brentq

    N, s, m, q = sol.N, sol.s, sol.m, sol.q
    A = _power_law_frac_lap(s, 2.0 * q * m, N)
    sign = 1.0 if sol.family == "vss-ext" else -1.0
    # residual/(theta^m |x|^{-2qm-2s}) = -sign*C/(1-m) + C^m A
    target = lambda logC: (-sign * math.exp(logC) / (1.0 - m)
                           + math.exp(logC * m) * A)
    lo, hi = -40.0, 40.0
    if target(lo) * target(hi) > 0:
        raise ParameterError(
            "no positive amplitude solves the separated-form residual; "
            "the spatial operator value has the wrong sign")
    return math.exp(brentq(target, lo, hi, xtol=1e-14))


def fix_constants(sol: SelfSimilarSolution, mass: float | None = None,
                  radius: float | None = None,
                  extinction_time: float | None = None
                  ) -> SelfSimilarSolution:
    """Pin (lam, R) from a mass or a radius normalization.

    Mass-conserving families take exactly one of ``mass`` or ``radius``
    (the algebraic constraint supplies the missing equation).  The
    extinction family takes ``extinction_time`` plus one of
    ``mass``/``radius``.  The infinite-mass family takes ``radius``
    only.  The separated-variables families ignore all three and solve
    for their amplitude.
    """
    fam = sol.family
    if fam in ("vss-ext", "vss-grow"):
        T = extinction_time if extinction_time is not None else sol.anchor
        _require(fam != "vss-ext" or T > 0.0, "extinction time must be > 0")
        C = _vss_amplitude(sol)
        return replace(sol, lam=C, R=0.0,
                       anchor=T if fam == "vss-ext" else 0.0)

    rho, K = _constraint_constant(sol)
    if fam == "fpme1-im" and mass is not None:
        raise ParameterError("the infinite-mass family admits no finite "
                             "mass normalization")
    if mass is not None and radius is not None:
        raise ParameterError("give exactly one of mass or radius")

    if fam == "fpme1-ext":
        T = extinction_time if extinction_time is not None else sol.anchor
        _require(T > 0.0, "extinction time must be > 0")
        if mass is not None:
            # initial mass M0 = lam W T^alpha R^{-2s} plus the amplitude
            # balance lam^{1-m} R^{-2s} = K pin (lam, R) uniquely
            _require(mass > 0.0, "mass must be > 0")
            W = _mass_coefficient(sol.N, sol.s)
            lnB = math.log(mass / (W * T**sol.alpha))
            L = (lnB - math.log(K)) / sol.m
            r = (L - lnB) / (2.0 * sol.s)
            lam, R = math.exp(L), math.exp(r)
        else:
            R = radius if radius is not None else 1.0
            _require(R > 0.0, "radius must be > 0")
            lam = (K / R**rho) ** (1.0 / (1.0 - sol.m))
        return replace(sol, lam=lam, R=R, anchor=T)

    if fam == "fpme1-im" or (mass is None and radius is not None) or \
            (mass is None and radius is None):
        R = radius if radius is not None else 1.0
        _require(R > 0.0, "radius must be > 0")
        if abs(1.0 - sol.m) < 1e-14:
            raise ParameterError("m = 1 leaves the amplitude free; give a "
                                 "mass instead of a radius")
        lam = (K / R**rho) ** (1.0 / (1.0 - sol.m))
        return replace(sol, lam=lam, R=R)

    # mass-pinned: solve the log-linear pair
    #   (1-m) ln lam + rho ln R = ln K
    #   ln lam - 2s ln R = ln(mass / W)
    _require(mass > 0.0, "mass must be > 0")
    W = _mass_coefficient(sol.N, sol.s)
    b1, b2 = math.log(K), math.log(mass / W)
    a11, a12 = 1.0 - sol.m, rho
    a21, a22 = 1.0, -2.0 * sol.s
    det = a11 * a22 - a12 * a21
    if abs(det) < 1e-14:
        raise ParameterError("degenerate normalization system")
    L = (b1 * a22 - a12 * b2) / det
    r = (a11 * b2 - b1 * a21) / det
    return replace(sol, lam=math.exp(L), R=math.exp(r))


def mass(sol: SelfSimilarSolution) -> float:
    """Total mass of the spatial profile; inf when the tail exponent is
    too small."""
    if sol.family in ("vss-ext", "vss-grow"):
        return math.inf
    if sol.lam is None or sol.R is None:
        raise ParameterError("fix the constants before asking for mass")
    if sol.q <= sol.N / 2.0:
        return math.inf
    return (sol.lam * math.pi ** (sol.N / 2.0)
            * gamma(sol.q - sol.N / 2.0) / gamma(sol.q)
            * sol.R ** (sol.N - 2.0 * sol.q))


def evaluate(sol: SelfSimilarSolution, x, t: float):
    """Pointwise value at radius |x| = x and time t (x may be an array).

    Forward families need t > 0, extinction-type families 0 <= t <= T,
    and the separated-variables families x != 0.
    """
    if sol.lam is None or sol.R is None:
        raise ParameterError("fix the constants before evaluating")
    r = np.abs(np.asarray(x, dtype=float))
    fam = sol.family

    if fam in ("vss-ext", "vss-grow"):
        if np.any(r == 0.0):
            raise ParameterError("separated-variables solutions are "
                                 "singular at x = 0")
        if fam == "vss-ext":
            T = sol.anchor
            if not 0.0 <= t <= T:
                raise ParameterError(f"time must lie in [0, {T}]")
            theta = (T - t) ** sol.alpha
        else:
            if t <= 0.0:
                raise ParameterError("time must be positive")
            theta = t ** (-sol.alpha)
        out = sol.lam * theta * r ** (-2.0 * sol.q)
        return out if np.ndim(x) else float(out)

    if fam == "fpme1-ext":
        T = sol.anchor
        if not 0.0 <= t <= T:
            raise ParameterError(f"time must lie in [0, {T}]")
        out = (sol.lam * (T - t) ** sol.alpha
               * (sol.R**2 + r**2) ** (-sol.q))
        return out if np.ndim(x) else float(out)

    if t <= 0.0:
        raise ParameterError("time must be positive")
    y = r * t ** (-sol.beta)
    out = sol.lam * t ** (-sol.alpha) * (sol.R**2 + y**2) ** (-sol.q)
    return out if np.ndim(x) else float(out)


def profile(sol: SelfSimilarSolution) -> RadialProfile:
    """The bare similarity profile Phi (no time factors).

    This is the object the profile equations govern; fixed-time slices
    carry extra time-dependent amplitude and scale factors and are
    produced by ``spatial_profile``.
    """
    if sol.lam is None or sol.R is None:
        raise ParameterError("fix the constants before asking for the "
                             "profile")
    if sol.family in ("vss-ext", "vss-grow"):
        raise ParameterError("separated-variables solutions are not "
                             "radial profiles")
    return RadialProfile("rising", sol.q, sol.R, sol.lam, sol.N)


def spatial_profile(sol: SelfSimilarSolution, t: float) -> RadialProfile:
    """The fixed-time spatial slice as a rising profile."""
    if sol.lam is None or sol.R is None:
        raise ParameterError("fix the constants before slicing")
    if sol.family in ("vss-ext", "vss-grow"):
        raise ParameterError("separated-variables solutions are not "
                             "radial profiles")
    if sol.family == "fpme1-ext":
        if not 0.0 <= t < sol.anchor:
            raise ParameterError("time outside [0, T)")
        return RadialProfile("rising", sol.q, sol.R,
                             sol.lam * (sol.anchor - t) ** sol.alpha, sol.N)
    if t <= 0.0:
        raise ParameterError("time must be positive")
    return RadialProfile(
        "rising", sol.q, sol.R * t**sol.beta,
        sol.lam * t ** (2.0 * sol.q * sol.beta - sol.alpha), sol.N)


_JSON_FORMAT = "fpme-solution"
_JSON_VERSION = 1


def to_json(sol: SelfSimilarSolution) -> str:
    doc = {
        "format": _JSON_FORMAT,
        "version": _JSON_VERSION,
        "family": sol.family,
        "N": sol.N,
        "s": sol.s,
        "m": sol.m,
        "q": sol.q,
        "alpha": sol.alpha,
        "beta": sol.beta,
        "lam": sol.lam,
        "R": sol.R,
        "anchor": sol.anchor,
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def from_json(text: str) -> SelfSimilarSolution:
    doc = json.loads(text)
    if doc.get("format") != _JSON_FORMAT:
        raise ParameterError("not a solution document")
    if doc.get("version") != _JSON_VERSION:
        raise ParameterError(f"unsupported version {doc.get('version')}")
    return SelfSimilarSolution(
        family=doc["family"], N=int(doc["N"]), s=float(doc["s"]),
        m=float(doc["m"]), q=float(doc["q"]), alpha=float(doc["alpha"]),
        beta=float(doc["beta"]),
        lam=None if doc["lam"] is None else float(doc["lam"]),
        R=None if doc["R"] is None else float(doc["R"]),
        anchor=float(doc["anchor"]),
    )
