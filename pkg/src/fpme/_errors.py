"""Exception and warning types shared across the package."""


class ParameterError(ValueError):
    """A parameter combination lies outside an operation's domain."""


class PoleError(ParameterError):
    """A Gamma (or Pochhammer) factor was requested at a pole."""


class QuadratureError(RuntimeError):
    """An adaptive quadrature failed to reach its tolerance."""


class InstabilityError(RuntimeError):
    """A time integration blew up even after step-size reduction."""


class ValidityWarning(RuntimeWarning):
    """Parameters are accepted but sit in a window where a closed form
    changes sign or loses its usual interpretation."""
