"""Exception types raised by the toolkit."""


class QSFError(ValueError):
    """Base class for invalid inputs to the toolkit."""


class InvalidDimensionError(QSFError):
    pass


class DimensionMismatchError(QSFError):
    pass


class PreconditionError(QSFError):
    pass


class FrameConstructionError(QSFError):
    pass


class DegeneratePlaneError(QSFError):
    pass


class NotApplicableError(QSFError):
    pass
