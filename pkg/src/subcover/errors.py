"""Exception types shared across the package."""


class SubcoverError(Exception):
    """Base class for all errors raised by this package."""


class InstanceError(SubcoverError):
    """A problem instance violates its construction contract."""


class DomainError(SubcoverError):
    """An argument is outside the mathematical domain of an operation."""


class StepLimitExceeded(SubcoverError):
    """Greedy failed to reach its target within the allowed step budget."""

    def __init__(self, message, achieved_f=None):
        super().__init__(message)
        self.achieved_f = achieved_f


class BinOverflowError(SubcoverError):
    """The requested bin structure exceeds the configured population cap."""


class InfeasibleError(SubcoverError):
    """No subset of the ground set reaches the threshold."""


class BudgetExceededError(SubcoverError):
    """An exact enumeration was requested beyond its size guard."""


class SnapParseError(SubcoverError):
    """A SNAP edge-list file contains a malformed line."""

    def __init__(self, message, line_number):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class EmptyGraphError(SubcoverError):
    """An edge-list file produced no vertices and no edges."""


class SchemaError(SubcoverError):
    """A structured file is missing or misusing a field."""

    def __init__(self, field, message=None):
        super().__init__(message or f"invalid or missing field: {field}")
        self.field = field


class CacheError(SubcoverError):
    """A binary cache file has the wrong format or the wrong key."""


class ConfigError(SubcoverError):
    """An experiment configuration is inconsistent."""
