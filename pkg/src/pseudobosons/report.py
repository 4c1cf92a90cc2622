"""Verification outcomes and their deterministic JSON / Markdown rendering."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from . import __version__

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"


@dataclass(frozen=True)
class Check:
    name: str
    status: str
    witness: str | None = None
    detail: str | None = None

    @classmethod
    def ok(cls, name: str, detail: str | None = None) -> Check:
        return cls(name, PASS, None, detail)

    @classmethod
    def fail(cls, name: str, witness: str) -> Check:
        return cls(name, FAIL, witness or "<no witness>")

    @classmethod
    def skip(cls, name: str, reason: str) -> Check:
        return cls(name, SKIPPED, None, reason)

    @classmethod
    def from_bool(cls, name: str, good: bool, witness: str, detail: str | None = None) -> Check:
        return cls.ok(name, detail) if good else cls.fail(name, witness)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def as_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"name": self.name, "status": self.status}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.detail is not None:
            out["detail"] = self.detail
        return out


@dataclass
class Report:
    suite: str
    params: dict[str, Any] = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    version: str = __version__

    def add(self, *checks: Check) -> None:
        self.checks.extend(checks)

    def extend(self, checks) -> None:
        self.checks.extend(checks)

    @property
    def summary(self) -> dict[str, int]:
        counts = {PASS: 0, FAIL: 0, SKIPPED: 0}
        for c in self.checks:
            counts[c.status] += 1
        return counts

    @property
    def ok(self) -> bool:
        return self.summary[FAIL] == 0

    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.status == FAIL]

    def as_dict(self) -> dict[str, Any]:
        return {
            "suite": self.suite,
            "params": {k: self.params[k] for k in sorted(self.params)},
            "checks": [c.as_dict() for c in self.checks],
            "summary": self.summary,
            "version": self.version,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=False)

    def to_markdown(self) -> str:
        lines = [f"# {self.suite}", ""]
        if self.params:
            lines.append("| parameter | value |")
            lines.append("|---|---|")
            for k in sorted(self.params):
                lines.append(f"| {k} | {self.params[k]} |")
            lines.append("")
        lines.append("| check | status | witness / detail |")
        lines.append("|---|---|---|")
        for c in self.checks:
            note = c.witness if c.witness is not None else (c.detail or "")
            note = note.replace("|", "\\|")
            lines.append(f"| {c.name} | {c.status} | {note} |")
        s = self.summary
        lines += ["", f"pass: {s[PASS]}, fail: {s[FAIL]}, skipped: {s[SKIPPED]}", f"version: {self.version}"]
        return "\n".join(lines) + "\n"


def merge(suite: str, reports: list[Report], params: dict[str, Any] | None = None) -> Report:
    """Concatenate reports in suite-name order, prefixing check names."""
    out = Report(suite, dict(params or {}))
    for r in sorted(reports, key=lambda r: r.suite):
        for c in r.checks:
            out.add(Check(f"{r.suite}/{c.name}", c.status, c.witness, c.detail))
        for k, v in r.params.items():
            out.params.setdefault(f"{r.suite}.{k}", v)
    return out
