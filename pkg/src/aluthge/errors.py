"""Exception hierarchy shared by all modules."""


class AluthgeError(Exception):
    """Base class for every error raised by this package."""


class NonFinite(AluthgeError, ValueError):
    pass


class DimensionMismatch(AluthgeError, ValueError):
    pass


class NonHermitian(AluthgeError, ValueError):
    pass


class NotPSD(AluthgeError, ValueError):
    pass


class ZeroVector(AluthgeError, ValueError):
    pass


class NotAProjection(AluthgeError, ValueError):
    pass


class NonUnitaryCarrier(AluthgeError, ValueError):
    pass


class NotScalarValued(AluthgeError, ValueError):
    pass


class ConditionViolated(AluthgeError):
    pass


class NotRankOneImage(AluthgeError):
    pass


class NotAProjectionImage(AluthgeError):
    pass


class NonUnitaryResult(AluthgeError):
    """Extraction produced a matrix failing validation.

    The partially built result is attached so callers can inspect residuals.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class MalformedDocument(AluthgeError, ValueError):
    """A JSON document does not follow the matrix/map schema."""

    def __init__(self, message, path="$"):
        super().__init__(f"{path}: {message}")
        self.path = path
