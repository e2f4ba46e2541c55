"""Exception types shared across the package."""


class ThinboundError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(ThinboundError):
    """A parameter violates a documented precondition."""


class EvaluationError(ThinboundError):
    """A field produced a non-finite value at a quadrature point."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class UnsupportedFieldError(ThinboundError):
    """The field representation lacks data required by the operation."""


class NotAdmissibleError(ThinboundError):
    """The approximation violates the obstacle or boundary condition."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotEquilibratedError(ThinboundError):
    """Flux is outside the equilibrated set required by the basic bound."""


class IncompleteConstantsError(ThinboundError):
    """A required inequality constant has no certified value."""

    def __init__(self, missing):
        super().__init__(
            "no certified value for constant(s): " + ", ".join(sorted(missing))
        )
        self.missing = tuple(sorted(missing))


class ConditionViolationError(ThinboundError):
    """A zero-mean side condition does not hold; carries the measured means."""

    def __init__(self, message, measured):
        super().__init__(f"{message} (measured: {measured})")
        self.measured = dict(measured)


class InternalDefectError(ThinboundError):
    """An internal guarantee (e.g. monotone descent) was violated."""
