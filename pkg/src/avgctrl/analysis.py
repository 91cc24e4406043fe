"""The full decision pipeline for one pattern."""

from __future__ import annotations

import hashlib
import json
import random
import time
from dataclasses import dataclass, field

from .construction import (
    AVERAGED_CONTROLLABLE,
    averaged_rank_test,
    certificate_finding,
    monomial_certificate,
    random_compliant_pair,
)
from .findings import (
    FAILS,
    FAILS_NECESSARY,
    HOLDS,
    INCONCLUSIVE,
    Finding,
    node_names,
)
from .graph import SparsityPattern, accessible, to_json
from .necessary import acyclic_trap_search, walk_counting_test
from .structural import structural_controllable, structural_ensemble_controllable

__all__ = [
    "AnalysisReport",
    "analyze",
    "CONTROLLABLE",
    "NOT_CONTROLLABLE",
    "UNDETERMINED",
    "BASIS",
]

CONTROLLABLE = "structurally-averaged-controllable"
NOT_CONTROLLABLE = "not-structurally-averaged-controllable"
UNDETERMINED = "undetermined"

# what each record rests on, for the human-readable report
BASIS = {
    "accessibility": "every state reachable from an input (necessary)",
    "structural": "accessibility + Hall matching; implies averaged controllability",
    "structural-ensemble": "accessibility + disjoint cycle cover of the states",
    "walk-counting": "|states without walks longer than k| <= m*k for all k (necessary)",
    "acyclic-trap": "no acyclic, singly fed, in-deficient state subset (necessary)",
    "monomial-certificate": "self-looped root + spanning tree -> sparse Hilbert matrix",
    "random-pair-rank": "exact averaged rank of seeded random monomial pairs",
}

_REFUTING = ("accessibility", "walk-counting", "acyclic-trap")
_CERTIFYING = ("monomial-certificate", "random-pair-rank")


@dataclass
class AnalysisReport:
    pattern: SparsityPattern
    records: list[Finding] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    overall: str = UNDETERMINED

    @property
    def digest(self) -> str:
        return hashlib.sha256(to_json(self.pattern).encode()).hexdigest()[:16]

    def record(self, name: str) -> Finding | None:
        return next((r for r in self.records if r.test == name), None)

    @property
    def inconclusive_tests(self) -> list[str]:
        return [r.test for r in self.records if r.verdict in (INCONCLUSIVE, "refused")]

    @property
    def exit_code(self) -> int:
        return {CONTROLLABLE: 0, NOT_CONTROLLABLE: 1, UNDETERMINED: 2}[self.overall]

    def to_dict(self, timing: bool = False) -> dict:
        records = []
        for r in self.records:
            d = r.to_dict()
            if timing:
                d["timing"] = round(self.timings.get(r.test, 0.0), 6)
            records.append(d)
        return {
            "pattern": json.loads(to_json(self.pattern)),
            "digest": self.digest,
            "records": records,
            "overall": self.overall,
            "undetermined_by": self.inconclusive_tests if self.overall == UNDETERMINED else [],
        }

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), sort_keys=True)

    def to_text(self) -> str:
        lines = [f"pattern {self.digest}: n={self.pattern.n}, m={self.pattern.m}, "
                 f"{len(self.pattern.edges)} edges"]
        for r in self.records:
            lines.append(f"  {r.test:<22} {r.verdict:<17} [{BASIS.get(r.test, '')}]")
            if r.note:
                lines.append(f"  {'':<22} {r.note}")
            if r.witness and r.verdict != HOLDS or r.test == "monomial-certificate":
                lines.append(f"  {'':<22} witness: {json.dumps(r.witness, sort_keys=True)}")
        lines.append(f"overall: {self.overall}")
        if self.overall == UNDETERMINED:
            lines.append("  inconclusive: " + ", ".join(self.inconclusive_tests))
        return "\n".join(lines)


def _random_rank_finding(g: SparsityPattern, trials: int, j_max: int | None,
                         seed: int, structural_holds: bool) -> Finding:
    rng = random.Random(seed)
    best = 0
    for trial in range(trials):
        # a generic constant pair already works for structurally controllable patterns
        degree = 0 if structural_holds and trial == 0 else 5
        a, b = random_compliant_pair(g, rng, max_degree=degree)
        trace = averaged_rank_test(a, b, j_max)
        best = max(best, trace.rank)
        if trace.verdict == AVERAGED_CONTROLLABLE:
            return Finding("random-pair-rank", HOLDS, {
                "trial": trial, "seed": seed, "ranks": trace.ranks,
                "A": a.to_json(), "B": b.to_json(),
            })
    return Finding("random-pair-rank", INCONCLUSIVE,
                   {"trials": trials, "seed": seed, "best_rank": best, "j_max": j_max or 4 * g.n})


def analyze(g: SparsityPattern, trap_limit: int | None = None, j_max: int | None = None,
            random_trials: int = 8, random_limit: int = 10, seed: int = 0) -> AnalysisReport:
    """Run every test on ``g`` and classify it.

    The seeded random-pair search only runs when the monomial certificate
    did not settle the question, nothing refuted the pattern, and
    ``n <= random_limit``.
    """
    report = AnalysisReport(g)

    def run(name, fn):
        start = time.perf_counter()
        finding = fn()
        report.timings[name] = time.perf_counter() - start
        report.records.append(finding)
        return finding

    def accessibility():
        ok, unreachable = accessible(g)
        if ok:
            return Finding("accessibility", HOLDS)
        return Finding("accessibility", FAILS, {"unreachable": node_names(unreachable)})

    run("accessibility", accessibility)
    structural = run("structural", lambda: structural_controllable(g))
    run("structural-ensemble", lambda: structural_ensemble_controllable(g))
    run("walk-counting", lambda: walk_counting_test(g))
    run("acyclic-trap", lambda: acyclic_trap_search(g, trap_limit))
    cert = run("monomial-certificate", lambda: certificate_finding(monomial_certificate(g)))

    refuted = any(r.verdict in (FAILS, FAILS_NECESSARY)
                  for r in report.records if r.test in _REFUTING)
    if cert.verdict != HOLDS and not refuted and g.n <= random_limit:
        run("random-pair-rank", lambda: _random_rank_finding(
            g, random_trials, j_max, seed, structural.verdict == HOLDS))

    certified = any(r.verdict == HOLDS for r in report.records if r.test in _CERTIFYING)
    if certified and refuted:
        raise AssertionError(f"contradictory verdicts for {g!r}")
    report.overall = CONTROLLABLE if certified else NOT_CONTROLLABLE if refuted else UNDETERMINED
    return report
