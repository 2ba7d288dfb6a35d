"""Re-derive the admissible exponents from the gap function.

In the rescaled radial variable r the profile equation's defect is

    g(r) = 2F1(m q + s, N/2 + s; N/2; -r^2)
           - (1 + r^2)^{-q} - bt * r d/dr (1 + r^2)^{-q},

where bt is the ratio of the drift and amplitude coefficients.  Its
even Taylor coefficients are exact Pochhammer expressions; forcing them
to vanish order by order pins m, then q, and finally restricts bt to
the roots of a quartic.  Each surviving root assembles into one of the
catalog families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._errors import ParameterError
from .catalog import SelfSimilarSolution, make_family

__all__ = [
    "GapSeries",
    "BetaCase",
    "gap_coefficients",
    "solve_m",
    "solve_q",
    "beta_cases",
    "rederive_family",
]


@dataclass(frozen=True)
class GapSeries:
    """Even-order Taylor coefficients g_0, g_2, ..., g_{2K} of the gap
    function at fixed parameters."""

    N: int
    s: float
    m: float
    q: float
    bt: float
    coefficients: tuple

    def coefficient(self, order: int) -> float:
        if order % 2 or order < 0 or order > 2 * (len(self.coefficients)
                                                  - 1):
            raise ParameterError(f"no coefficient of order {order}")
        return self.coefficients[order // 2]


def gap_coefficients(N: int, s: float, m: float, q: float, bt: float,
                     kmax: int = 8) -> GapSeries:
    """Exact Taylor coefficients of the gap function through order kmax.

    Coefficient of r^{2n}: the hypergeometric term contributes
    (-1)^n (mq+s)_n (N/2+s)_n / ((N/2)_n n!), the binomial terms
    (-1)^n (q)_n / n! with the drift carrying an extra factor 2n.
    Assembled from Pochhammer products with compensated summation; g_0
    vanishes identically.
    """
    if kmax % 2 or kmax < 2:
        raise ParameterError("kmax must be a positive even order")
    half = N / 2.0
    coeffs = [0.0]
    for n in range(1, kmax // 2 + 1):
        hyper_num = 1.0
        hyper_den = 1.0
        binom = 1.0
        for i in range(n):
            hyper_num *= (m * q + s + i) * (half + s + i)
            hyper_den *= (half + i) * (i + 1.0)
            binom *= (q + i) / (i + 1.0)
        if hyper_den == 0.0:
            raise ParameterError("Pochhammer pole in the gap series")
        sign = -1.0 if n % 2 else 1.0
        terms = [hyper_num / hyper_den, -binom, -2.0 * n * bt * binom]
        coeffs.append(sign * math.fsum(terms))
    return GapSeries(N, s, m, q, bt, tuple(coeffs))


def solve_m(N: int, s: float, q: float, bt: float) -> float:
    """The unique m annihilating g_2 (g_2 is affine in m)."""
    if q == 0.0:
        raise ParameterError("q = 0 is degenerate")
    return (2.0 * bt * q * N + N * q - N * s - 2.0 * s**2) / (q * (N + 2 * s))


def solve_q(N: int, s: float, bt: float) -> float:
    """The nonzero root of g_4 = 0 after eliminating m."""
    den = (N**2 * bt**2 + 2.0 * N * bt**2 * s + 2.0 * N * bt**2
           - 4.0 * bt * s - s)
    if abs(den) < 1e-14:
        raise ParameterError("degenerate drift ratio: q escapes to "
                             "infinity")
    num = (N + 2.0 * s) * (N * bt - 2.0 * bt * s + 2.0 * bt - s)
    return 0.5 * num / den


@dataclass(frozen=True)
class BetaCase:
    """One root of the order-six closure quartic, classified."""

    bt: float | None
    label: str
    family: str | None


def beta_cases(N: int, s: float) -> list[BetaCase]:
    """The four closure roots bt in {0, 1/N, s/N, 1/(N+2s-2)}, each
    classified by the solution family it assembles into (or rejected).
    """
    if not 0.0 < s < 1.0:
        raise ParameterError("order must satisfy 0 < s < 1")
    if N < 1:
        raise ParameterError("dimension must be >= 1")
    if N > 2.0 * s:
        ext = BetaCase(0.0, "extinction", "fpme1-ext")
    else:
        ext = BetaCase(0.0, "extinction (empty here: m <= 0)", None)
    cases = [
        ext,
        BetaCase(1.0 / N, "first-kind", "fpme1-mc"),
        BetaCase(s / N, "rejected: q = -1 < 0", None),
    ]
    d = N + 2.0 * s - 2.0
    if abs(d) < 1e-14:
        cases.append(BetaCase(None, "absent: root at infinity", None))
    elif d > 0.0 and (N - 2.0 * s) / d > 0.0:
        cases.append(BetaCase(1.0 / d, "infinite-mass", "fpme1-im"))
    else:
        cases.append(BetaCase(1.0 / d,
                              "infinite-mass (empty here: m <= 0)", None))
    return cases


def rederive_family(N: int, s: float, case: BetaCase) -> SelfSimilarSolution:
    """Assemble (m, q, alpha, beta) from a surviving closure root.

    The missing scaling relation is the family's time-direction
    condition: alpha (m-1) + 2 s beta = -1 for the extinction root and
    +1 for the forward-time roots, combined with alpha = beta / bt when
    bt != 0.
    """
    if case.family is None:
        raise ParameterError(f"case {case.label!r} does not assemble into "
                             "a solution family")
    bt = case.bt
    q = solve_q(N, s, bt)
    m = solve_m(N, s, q, bt)
    if bt == 0.0:
        alpha = 1.0 / (1.0 - m)
        beta = 0.0
    else:
        # alpha = beta/bt and alpha(m-1) + 2 s beta = 1
        beta = 1.0 / ((m - 1.0) / bt + 2.0 * s)
        alpha = beta / bt
    anchor = 1.0 if case.family == "fpme1-ext" else 0.0
    return SelfSimilarSolution(case.family, N, s, m, q, alpha, beta,
                               anchor=anchor)


def assembled_gap(N: int, s: float, bt: float, kmax: int = 8) -> GapSeries:
    """Gap series at the (m, q) solving the first two orders; used to
    scan for the closure roots."""
    q = solve_q(N, s, bt)
    m = solve_m(N, s, q, bt)
    return gap_coefficients(N, s, m, q, bt, kmax)
