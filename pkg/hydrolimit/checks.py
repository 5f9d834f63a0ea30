"""Pass/fail records returned by the verification operations."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckResult:
    """One named assertion: the measured value against its limit."""

    name: str
    passed: bool
    value: float | None = None
    limit: float | None = None
    detail: str = ""


@dataclass
class CheckList:
    """Ordered collection of check results."""

    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, value: float | None = None, limit: float | None = None,
            detail: str = "") -> CheckResult:
        result = CheckResult(name, bool(passed), None if value is None else float(value),
                             None if limit is None else float(limit), detail)
        if not result.passed:
            logger.warning("Check %s failed: value=%r limit=%r %s", name, value, limit, detail)
        self.checks.append(result)
        return result

    def at_most(self, name: str, value: float, limit: float, detail: str = "") -> CheckResult:
        return self.add(name, value <= limit, value, limit, detail)

    def failed(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def get(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def as_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "value": c.value, "limit": c.limit, "detail": c.detail}
                for c in self.checks
            ],
        }
