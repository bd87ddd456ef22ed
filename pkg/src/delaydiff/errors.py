"""Exception hierarchy shared by every module of the package."""


class DelayDiffError(Exception):
    """Base class for all package errors."""


class InvalidInputError(DelayDiffError, ValueError):
    pass


class GainRangeError(DelayDiffError, OverflowError):
    """A second-step gain overflowed; ``index`` is the 1-based gain position."""

    def __init__(self, message, index):
        super().__init__(message)
        self.index = index


class DivergenceError(DelayDiffError, FloatingPointError):
    """Observer state became non-finite at simulation time ``time``."""

    def __init__(self, message, time):
        super().__init__(message)
        self.time = time


class StabilityError(DelayDiffError, ValueError):
    pass


class StabilityWarning(UserWarning):
    pass


class PoleProximityError(DelayDiffError, ZeroDivisionError):
    pass


class BufferUnderflowError(DelayDiffError, IndexError):
    pass


class ConfigError(DelayDiffError, ValueError):
    """Invalid scenario configuration; ``field`` names the offending entry."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class AnalysisError(DelayDiffError, ValueError):
    pass
