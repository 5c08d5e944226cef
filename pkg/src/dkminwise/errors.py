"""Exception hierarchy shared by every module of the package."""


class DkmwError(Exception):
    """Base class for all library errors."""


class PreconditionError(DkmwError, ValueError):
    """An argument violates an operation's stated precondition."""


class DomainError(PreconditionError):
    """A hash input lies outside the universe [0, u)."""


class ConfigurationError(DkmwError, ValueError):
    """Incompatible sketches, functions or field parameters."""


class EnumerationCapError(DkmwError):
    """Exhaustive enumeration would exceed the configured cap."""

    def __init__(self, size: int, cap: int):
        super().__init__(f"family of size {size} exceeds enumeration cap {cap}")
        self.size = size
        self.cap = cap


class SketchFormatError(DkmwError):
    """A sketch file is malformed; ``field`` names the offending field."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class StateError(DkmwError):
    """An object is not in the state required by the call."""
