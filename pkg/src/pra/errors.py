"""Exception hierarchy shared by all modules."""


class PraError(Exception):
    """Base class for every error raised by this package."""


class InstanceError(PraError, ValueError):
    """Malformed instance data (duplicate ids, bad periods, dangling references)."""


class PeriodRangeError(PraError, IndexError):
    """A period index outside ``1..T``."""


class IncompleteAssignmentError(PraError, ValueError):
    """An assignment lacks a room for some ``(patient, period)`` of its domain."""


class InfeasibleAssignmentError(PraError, ValueError):
    """An assignment puts more patients into a room than it has beds."""


class ScoreDataError(PraError, ValueError):
    """A scorer needs an attribute (age, arrival) a patient does not carry."""


class InfeasibleError(PraError):
    """No feasible room packing exists for some period."""

    def __init__(self, message, period=None):
        super().__init__(message)
        self.period = period


class UnsupportedCapacityError(PraError, ValueError):
    """Room capacities outside ``{1, 2}`` reached a path that only handles those."""


class ConfigError(PraError, ValueError):
    """Inconsistent solver or model configuration."""


class InstanceFileError(InstanceError):
    """A document that does not describe a valid instance; ``path`` is a JSON pointer."""

    def __init__(self, message, path=""):
        super().__init__(f"{path or '/'}: {message}")
        self.path = path
