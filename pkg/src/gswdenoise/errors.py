"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class UnsupportedConfigurationError(ValueError):
    """A rule was asked to run in a configuration it does not support."""


class NumericalError(ArithmeticError):
    """A numerical routine failed to reach its requested accuracy."""

    def __init__(self, message, estimate=None, error_estimate=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_estimate = error_estimate


class QuadratureError(NumericalError):
    """Adaptive quadrature hit its subdivision cap before converging."""
