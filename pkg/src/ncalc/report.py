from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class CheckReport:
    """Outcome of an exhaustive or bounded check.

    ``violations`` lists every failing instance found; ``value`` carries the
    common value of an invariance check; ``witness`` holds a counterexample
    when one is available.  ``reason`` is set when the check could not run.
    """

    violations: list = field(default_factory=list)
    value: Any = None
    witness: Any = None
    reason: str | None = None

    @property
    def ok(self) -> bool:
        return self.reason is None and not self.violations and self.witness is None

    @property
    def outcome(self) -> str:
        if self.reason is not None:
            return "untestable"
        return "pass" if self.ok else "fail"

    def __bool__(self) -> bool:
        return self.ok
