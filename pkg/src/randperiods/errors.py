"""Exception types raised across the package."""


class RandPeriodsError(Exception):
    pass


class DomainError(RandPeriodsError, ValueError):
    pass


class EmptyCluster(RandPeriodsError, ValueError):
    def __init__(self, message, *, lo=None, hi=None):
        super().__init__(message)
        self.lo = lo
        self.hi = hi


class InvalidDirection(RandPeriodsError, ValueError):
    pass


class InvalidLength(RandPeriodsError, ValueError):
    pass


class QuadratureNotConverged(RandPeriodsError, RuntimeError):
    pass


class PoorFit(RandPeriodsError, RuntimeError):
    pass


class DegenerateDraw(RandPeriodsError, RuntimeError):
    pass


class Unbounded(RandPeriodsError, ZeroDivisionError):
    pass


class ConfigError(RandPeriodsError, ValueError):
    pass
