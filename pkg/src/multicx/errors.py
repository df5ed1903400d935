"""Exception types shared across the package."""


class MulticxError(Exception):
    """Base class for all errors raised by this package."""


class ShapeMismatch(MulticxError):
    pass


class DegreeMismatch(MulticxError):
    pass


class SpaceMismatch(MulticxError):
    pass


class SourceTargetMismatch(MulticxError):
    pass


class NotContained(MulticxError):
    pass


class NotWellDefined(MulticxError):
    pass


class NotSquareZero(MulticxError):
    pass


class NotInvertible(MulticxError):
    pass


class InvalidMulticomplex(MulticxError):
    pass


class BadConstantTerm(MulticxError):
    pass


class HodgeDataFails(MulticxError):
    pass


class NotPoisson(MulticxError):
    pass


class NotJacobi(MulticxError):
    pass


class WindowTooSmall(MulticxError):
    pass


class ParseError(MulticxError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
