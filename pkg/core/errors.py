"""Exception hierarchy shared by every package."""

from typing import Optional


class StreamSimError(Exception):
    """Base class for simulator errors."""


class InvalidBoxError(StreamSimError, ValueError):
    """Box violates the geometry invariants."""


class TraceExhaustedError(StreamSimError, RuntimeError):
    """Replayed delay trace has no samples left."""


class TraceFormatError(StreamSimError, ValueError):
    """Delay trace CSV could not be parsed."""

    def __init__(self, line_number: int, message: str) -> None:
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class ConfigError(StreamSimError, ValueError):
    """Run configuration is invalid."""

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field


class DigestMismatchError(StreamSimError, ValueError):
    """Stream log was produced against a different world."""


class SchemaVersionError(StreamSimError, ValueError):
    """JSON document declares an unsupported schema version."""

    def __init__(self, found: Optional[int], supported: int) -> None:
        super().__init__(f"unsupported schema_version {found!r} (supported: {supported})")
        self.found = found
        self.supported = supported
