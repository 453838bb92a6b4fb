"""
Exception hierarchy for efgrid
"""

from typing import Optional


class EfgridError(Exception):
    """Base class for every error raised by efgrid"""


class UnknownEntityError(EfgridError, LookupError):
    """Entity is not present in the store"""

    def __init__(self, entity: str, hint: str = ""):
        super().__init__(f"unknown entity '{entity}'{hint}")
        self.entity = entity


class UnknownSourceError(EfgridError, LookupError):
    """Source is not registered in the store"""

    def __init__(self, source: str, hint: str = ""):
        super().__init__(f"unknown source '{source}'{hint}")
        self.source = source


class StoreFrozenError(EfgridError, RuntimeError):
    """Mutation attempted on a frozen store"""


class StoreNotFrozenError(EfgridError, RuntimeError):
    """Query attempted before the store was frozen"""


class SourceKindMismatchError(EfgridError, ValueError):
    """Source name already registered with another carrier kind"""


class RecordError(EfgridError, ValueError):
    """Carrier record violates its type invariants"""

    def __init__(self, record_type: str, message: str):
        super().__init__(f"{record_type}: {message}")
        self.record_type = record_type


class LineParseError(EfgridError, ValueError):
    """Input line could not be parsed into a carrier record"""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.message = message
        self.line_number = line_number
        super().__init__(self._render())

    def _render(self) -> str:
        if self.line_number is None:
            return self.message
        return f"line {self.line_number}: {self.message}"

    def at_line(self, line_number: int) -> "LineParseError":
        """Return a copy carrying the given line number"""
        return type(self)(self.message, line_number)


class SnapshotError(EfgridError, ValueError):
    """Snapshot file is malformed"""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class SnapshotVersionError(SnapshotError):
    """Snapshot header names an unsupported format version"""


class UsageError(EfgridError, ValueError):
    """Command line could not be interpreted"""
