"""Exception hierarchy shared by all freezeshift modules."""


class FreezeshiftError(Exception):
    """Base class for all library errors."""


class InputError(FreezeshiftError):
    """Caller passed inconsistent or out-of-contract arguments."""


class ResourceLimitError(FreezeshiftError):
    """A feasibility guard was exceeded; carries the bound that tripped."""

    def __init__(self, message, *, bound=None, requested=None):
        super().__init__(message)
        self.bound = bound
        self.requested = requested


class UndeterminedError(FreezeshiftError):
    """Finite window too small to certify the answer; carries progress made."""

    def __init__(self, message, *, level_reached=None):
        super().__init__(message)
        self.level_reached = level_reached


class EmptyWindowError(FreezeshiftError):
    """Search exhausted without an admissible fill of the requested window."""


class NonConvergedError(FreezeshiftError):
    """Iterative solver hit its cap; carries the last certified enclosure."""

    def __init__(self, message, *, lower=None, upper=None):
        super().__init__(message)
        self.lower = lower
        self.upper = upper
