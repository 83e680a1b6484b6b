"""Exception hierarchy.

Everything raised on bad input derives from :class:`QsoError`, itself a
``ValueError``, so callers can catch one class at the boundary (the CLI maps
it to exit code 2).
"""


class QsoError(ValueError):
    pass


class EmptyVector(QsoError):
    pass


class NegativeCoordinate(QsoError):
    pass


class BadSum(QsoError):
    pass


class IndexOutOfRange(QsoError):
    pass


class DimensionMismatch(QsoError):
    pass


class EmptyFace(QsoError):
    pass


class InvalidOperator(QsoError):
    """Coefficients violate the tensor or matrix invariants."""


class NotVolterra(QsoError):
    pass


class SamplingBudgetExceeded(QsoError):
    def __init__(self, message, rejections):
        super().__init__(message)
        self.rejections = rejections


class ZeroOffDiagonal(QsoError):
    pass


class NotTransversal(QsoError):
    pass


class DegenerateFace(QsoError):
    def __init__(self, message, face):
        super().__init__(message)
        self.face = face


class FaceBudgetExceeded(QsoError):
    pass


class UnsupportedDimension(QsoError):
    pass


class UnsupportedPeriod(QsoError):
    pass


class InvalidBudget(QsoError):
    pass


class SupportMismatch(QsoError):
    pass
