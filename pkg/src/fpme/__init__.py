"""Explicit self-similar solutions of fractional porous medium equations.

Closed-form fractional Laplacians of the two admissible radial profile
shapes, the catalog of explicit self-similar solution families, residual
checkers for the governing equations, a numerical re-derivation of the
admissible exponents, and a desk-scale periodic pseudo-spectral solver
for confirming the dynamical signatures.
"""

from ._errors import (
    InstabilityError,
    ParameterError,
    PoleError,
    QuadratureError,
    ValidityWarning,
)

__version__ = "0.1.0"

__all__ = [
    "InstabilityError",
    "ParameterError",
    "PoleError",
    "QuadratureError",
    "ValidityWarning",
    "__version__",
]
