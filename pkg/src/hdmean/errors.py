"""Exception types raised across the package."""


class HdmeanError(Exception):
    """Base class for package errors."""


class InvalidSample(HdmeanError, ValueError):
    pass


class DimensionMismatch(HdmeanError, ValueError):
    pass


class NonConvergence(HdmeanError, ArithmeticError):
    pass


class InvalidProbability(HdmeanError, ValueError):
    pass


class InvalidModel(HdmeanError, ValueError):
    pass


class IndexOutOfRange(HdmeanError, IndexError):
    pass


class NotPositiveSemidefinite(HdmeanError, ValueError):
    pass
