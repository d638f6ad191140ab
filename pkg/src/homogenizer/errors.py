"""Exception types shared across the package."""


class DimensionMismatchError(ValueError):
    """Operator dimensions or factor shapes do not agree."""


class PreconditionError(ValueError):
    """An input violates a documented precondition (range, Hermiticity, ...)."""


class NotPSDError(PreconditionError):
    """A matrix expected to be positive semidefinite has a negative eigenvalue."""


class NumericalError(RuntimeError):
    """A simulation produced an invalid state.

    ``context`` carries whatever locates the failure (init, eta, step).
    """

    def __init__(self, message, **context):
        self.context = context
        if context:
            where = ", ".join(f"{k}={v}" for k, v in context.items())
            message = f"{message} ({where})"
        super().__init__(message)
