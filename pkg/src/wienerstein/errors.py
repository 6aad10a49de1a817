"""Exception types raised across the package.

Validation problems derive from :class:`ValueError` so callers can catch them
generically; failures of a numerical budget (conditioning, quadrature error)
derive from :class:`NumericalBudgetError`.
"""


class WienerSteinError(Exception):
    """Base class for all package errors."""


class BadInput(WienerSteinError, ValueError):
    """An input failed validation. ``field`` names the offending field."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class AllZero(BadInput):
    pass


class OutOfRange(BadInput):
    pass


class OrderTooLow(BadInput):
    pass


class MissingBaseCumulant(BadInput):
    pass


class ZeroBaseCumulant(BadInput):
    pass


class InsufficientSamples(BadInput):
    pass


class SizeMismatch(BadInput):
    pass


class DomainError(BadInput):
    pass


class SamplerUnavailable(BadInput):
    pass


class NumericalBudgetError(WienerSteinError, ArithmeticError):
    """A computation could not reach its accuracy target."""


class SingularVandermonde(NumericalBudgetError):
    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class BranchCut(NumericalBudgetError):
    pass


class QuadratureBudgetExceeded(NumericalBudgetError):
    def __init__(self, message, error_estimate=None):
        super().__init__(message)
        self.error_estimate = error_estimate


class UnknownSubcommand(BadInput):
    pass
