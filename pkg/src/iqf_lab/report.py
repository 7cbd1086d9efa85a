"""Validation reports.

Validators never raise on mathematical failure; they return a report listing
each law that was checked together with the first counterexample found.  A
report with no failed checks has ``ok == True``.  Witnesses are small tuples
of element labels so they stay meaningful after serialization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Check:
    law: str
    ok: bool
    witness: Any = None

    def to_jsonable(self) -> dict:
        out: dict[str, Any] = {"law": self.law, "ok": self.ok}
        if not self.ok:
            out["witness"] = _jsonable(self.witness)
        return out


@dataclass
class ValidationReport:
    subject: str
    checks: list[Check] = field(default_factory=list)

    def add(self, law: str, ok: bool, witness: Any = None) -> bool:
        self.checks.append(Check(law, bool(ok), witness if not ok else None))
        return bool(ok)

    def merge(self, other: "ValidationReport", prefix: str = "") -> None:
        for c in other.checks:
            law = f"{prefix}{c.law}" if prefix else c.law
            self.checks.append(Check(law, c.ok, c.witness))

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    def first_failure(self) -> Check | None:
        for c in self.checks:
            if not c.ok:
                return c
        return None

    def to_jsonable(self) -> dict:
        return {
            "subject": self.subject,
            "ok": self.ok,
            "checks": [c.to_jsonable() for c in self.checks],
        }

    def summary(self) -> str:
        if self.ok:
            return f"{self.subject}: ok ({len(self.checks)} checks)"
        f = self.first_failure()
        assert f is not None
        return f"{self.subject}: FAIL {f.law} witness={f.witness!r}"


def _jsonable(value: Any) -> Any:
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    return repr(value)
