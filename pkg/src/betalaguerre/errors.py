"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument violates a documented precondition."""


class DomainError(ValueError):
    """A special function was asked for a value outside its domain."""


class NumericalError(ArithmeticError):
    """An iterative routine failed to converge."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
