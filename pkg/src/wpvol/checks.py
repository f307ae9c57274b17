"""Shared result types for the verification checks."""
from __future__ import annotations

from dataclasses import dataclass, field


class NotApplicable(Exception):
    """A check's preconditions do not hold for the requested key (reported as skipped)."""


@dataclass
class CheckResult:
    """Outcome of a check; truthy iff it passed.

    ``detail`` carries check-specific data such as the truncation order used.
    """

    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed
