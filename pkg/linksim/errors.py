"""
Exception hierarchy for the simulator.
"""

from pathlib import Path
from typing import Optional, Union


class LinkSimError(Exception):
    """Base class for all simulator errors."""


class ScenarioParseError(LinkSimError):
    """Malformed scenario text."""

    def __init__(self, line: Optional[int], reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}" if line is not None else reason)


class ScenarioValidationError(LinkSimError):
    """Scenario parsed but is inconsistent (flow count, channel range, bounds)."""


class InvariantViolation(LinkSimError):
    """A simulator or scheduler invariant was broken. Always a logic bug."""


class UsageError(LinkSimError):
    """A pure function was called outside its domain."""


class ReportWriteError(LinkSimError):
    """Writing a report file failed."""

    def __init__(self, path: Union[str, Path], reason: str):
        self.path = Path(path)
        self.reason = reason
        super().__init__(f"{self.path}: {reason}")
