import json
import random

from hypothesis import given, settings

from avgctrl.analysis import CONTROLLABLE, NOT_CONTROLLABLE, UNDETERMINED, analyze
from avgctrl.graph import SparsityPattern
from oracles import random_pattern
from test_graph import patterns

ORDER = ["accessibility", "structural", "structural-ensemble", "walk-counting",
         "acyclic-trap", "monomial-certificate"]


def test_fan_is_certified(fan):
    rep = analyze(fan)
    assert [r.test for r in rep.records] == ORDER
    assert rep.overall == CONTROLLABLE and rep.exit_code == 0
    assert rep.record("structural").witness["in_neighbors"] == ["a1", "b1"]
    assert rep.record("monomial-certificate").witness["determinant"] == "1/240"


def test_dense_six_is_refuted(dense_six):
    rep = analyze(dense_six)
    assert rep.overall == NOT_CONTROLLABLE and rep.exit_code == 1
    assert rep.record("walk-counting").witness["k"] == 2
    assert rep.record("random-pair-rank") is None


def test_structural_pattern_certified_by_random_pair():
    # a plain path: no self-loop, so only the random-pair search can certify
    g = SparsityPattern.from_edges(3, 1, [("b1", "a1"), ("a1", "a2"), ("a2", "a3")])
    rep = analyze(g)
    assert rep.record("monomial-certificate").verdict == "refused"
    assert rep.record("random-pair-rank").verdict == "holds"
    assert rep.overall == CONTROLLABLE


def test_undetermined_lists_inconclusive_tests():
    # a 3-cycle driven at one node passes every necessary test but has no looped root
    g = SparsityPattern.from_edges(3, 1, [("b1", "a1"), ("a1", "a2"), ("a2", "a3"), ("a3", "a1")])
    rep = analyze(g, random_trials=0)
    assert rep.overall == UNDETERMINED and rep.exit_code == 2
    assert "monomial-certificate" in rep.inconclusive_tests
    d = rep.to_dict()
    assert d["undetermined_by"] == rep.inconclusive_tests
    assert "inconclusive:" in rep.to_text()


def test_json_is_deterministic(fan):
    a, b = analyze(fan).to_json(), analyze(fan).to_json()
    assert a == b
    assert "timing" not in a
    timed = json.loads(analyze(fan).to_json(timing=True))
    assert all("timing" in r for r in timed["records"])
    assert json.loads(a)["digest"] == analyze(fan).digest


def test_digest_ignores_edge_order(fan):
    shuffled = SparsityPattern.from_edges(3, 1, list(reversed(fan.sorted_edges())))
    assert analyze(shuffled).digest == analyze(fan).digest


@given(patterns(max_n=5, max_m=2))
@settings(max_examples=60, deadline=None)
def test_never_contradictory(g):
    # analyze raises on certified-and-refuted; also check overall is consistent
    rep = analyze(g, random_trials=2)
    verdicts = {r.test: r.verdict for r in rep.records}
    if rep.overall == CONTROLLABLE:
        assert verdicts["accessibility"] == "holds"
        assert verdicts["walk-counting"] == "passes-necessary"
    if verdicts["structural"] == "holds":
        assert rep.overall == CONTROLLABLE


def test_seed_changes_only_random_search():
    rng = random.Random(5)
    g = random_pattern(rng, 4, 1, 0.4)
    r1, r2 = analyze(g, seed=1), analyze(g, seed=1)
    assert r1.to_json() == r2.to_json()
