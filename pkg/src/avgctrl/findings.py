"""Verdict records shared by the graph tests and the report layer."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

HOLDS = "holds"
FAILS = "fails"
FAILS_NECESSARY = "fails-necessary"
PASSES_NECESSARY = "passes-necessary"
INCONCLUSIVE = "inconclusive"
REFUSED = "refused"

VERDICTS = (HOLDS, FAILS, FAILS_NECESSARY, PASSES_NECESSARY, INCONCLUSIVE, REFUSED)


@dataclass
class Finding:
    """Outcome of one test on one pattern.

    ``witness`` holds JSON-ready data that lets a reader re-check the verdict
    (an unreachable set, a Hall violator, a cycle cover, ...).
    """

    test: str
    verdict: str
    witness: dict[str, Any] = field(default_factory=dict)
    note: str = ""

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")

    def __bool__(self) -> bool:
        return self.verdict in (HOLDS, PASSES_NECESSARY)

    def to_dict(self) -> dict[str, Any]:
        out = {"test": self.test, "verdict": self.verdict, "witness": self.witness}
        if self.note:
            out["note"] = self.note
        return out


def node_names(nodes) -> list[str]:
    """Sorted string names, for witnesses."""
    return [str(v) for v in sorted(nodes)]
