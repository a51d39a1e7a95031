"""Exception hierarchy shared by all modules."""


class CGCError(Exception):
    """Base class for solver errors."""


class PointOutsideTube(CGCError):
    pass


class DegeneratePoint(CGCError):
    pass


class NonTangentInput(CGCError):
    pass


class NonTangentField(CGCError):
    pass


class EpsilonOutOfRange(CGCError):
    pass


class DegenerateCurve(CGCError):
    pass


class CurvesTooFar(CGCError):
    pass


class LedgerMismatch(CGCError):
    pass


class EmptySampleSet(CGCError):
    pass


class AmbiguousDegree(CGCError):
    def __init__(self, message, degree=None, residual=None):
        super().__init__(message)
        self.degree = degree
        self.residual = residual


class StepTooLarge(CGCError):
    pass


class DegreeLost(CGCError):
    pass


class NoConvergence(CGCError):
    """Raised when an iteration budget runs out; carries the partial report."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ScheduleUnderflow(CGCError):
    pass


class ContinuationBroke(CGCError):
    """Refinement failed at ``index`` of the epsilon schedule."""

    def __init__(self, message, index, report=None):
        super().__init__(message)
        self.index = index
        self.report = report


class NotUnitSpeed(CGCError):
    pass


class NotConstantSpeed(CGCError):
    pass


class ConfigError(CGCError):
    pass
