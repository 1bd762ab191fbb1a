"""Exception and warning types raised across the package."""


class TlfError(Exception):
    """Base class for all package errors."""


class DomainError(TlfError, ValueError):
    """A parameter lies outside the domain where a formula is defined."""


class UnsupportedFamilyError(DomainError):
    """A closed form was requested for a deformation family that has none."""


class QuadratureError(TlfError, ArithmeticError):
    """A numerical integral failed to reach its accuracy target."""


class DivergentIntegralError(QuadratureError):
    """A Mellin-type integral does not converge (deformation decays too slowly)."""


class IterationLimitError(TlfError, RuntimeError):
    """Rejection sampling exhausted its trial budget."""


class ScaleSeparationWarning(UserWarning):
    """Emitted when epsilon = (gamma/ell)**alpha is not small."""


class LevyRegimeWarning(UserWarning):
    """Emitted when a Levy-regime formula is used outside n*epsilon <= 0.1."""
