import random
from itertools import combinations

import pytest
from hypothesis import given, settings

from avgctrl.findings import FAILS, HOLDS
from avgctrl.graph import SparsityPattern, alpha, beta, in_neighbor_set
from avgctrl.structural import (
    brute_force_cycle_cover,
    brute_force_hall,
    cycle_cover,
    hall_matching,
    max_bipartite_matching,
    permutation_cycles,
    structural_controllable,
    structural_ensemble_controllable,
)
from oracles import random_pattern
from test_graph import patterns


def test_fan_fails_hall_with_all_states(fan):
    f = structural_controllable(fan)
    assert f.verdict == FAILS
    assert f.witness == {"deficient_set": ["a1", "a2", "a3"], "in_neighbors": ["a1", "b1"]}
    assert structural_ensemble_controllable(fan).verdict == FAILS


def test_chain_with_loops_holds():
    g = SparsityPattern.from_edges(2, 1, [("b1", "a1"), ("a1", "a2"), ("a1", "a1"), ("a2", "a2")])
    f = structural_controllable(g)
    assert f.verdict == HOLDS
    assert set(f.witness["matching"]) == {"a1", "a2"}
    ens = structural_ensemble_controllable(g)
    assert ens.verdict == HOLDS and ens.witness["cycles"] == [["a1"], ["a2"]]


def test_path_is_structurally_controllable_but_has_no_cycle_cover():
    g = SparsityPattern.from_edges(3, 1, [("b1", "a1"), ("a1", "a2"), ("a2", "a3")])
    assert structural_controllable(g).verdict == HOLDS
    assert cycle_cover(g) is None


def test_inaccessible_reports_unreachable(isolated):
    f = structural_controllable(isolated)
    assert f.verdict == FAILS and f.witness == {"unreachable": ["a2"]}


def test_matching_and_witness_small():
    left, right = ["x", "y", "z"], ["p", "q"]
    adj = {"x": ["p"], "y": ["p"], "z": ["q"]}
    res = max_bipartite_matching(left, right, adj)
    assert res.size == 2 and not res.saturating
    # both {x, y} and {x, y, z} have deficiency 1; the maximal one is reported
    assert res.deficiency_witness == frozenset({"x", "y", "z"})


def test_permutation_cycles():
    assert permutation_cycles({1: 2, 2: 1, 3: 3, 4: 5, 5: 4}) == [[1, 2], [3], [4, 5]]


@given(patterns(max_n=7))
@settings(max_examples=200, deadline=None)
def test_matching_agrees_with_subset_enumeration(g):
    result = hall_matching(g)
    ok, violator = brute_force_hall(g)
    assert result.saturating == ok
    if not ok:
        # the reported witness is a genuine violator, at least as large as the first one
        w = result.deficiency_witness
        assert len(in_neighbor_set(g, w)) < len(w)
        assert len(w) >= len(violator)
    else:
        assert sorted(result.pairs) == g.alpha_nodes
        assert all(g.has_edge(u, v) for v, u in result.pairs.items())
        assert len(set(result.pairs.values())) == g.n


@given(patterns(max_n=7))
@settings(max_examples=200, deadline=None)
def test_cycle_cover_agrees_with_backtracking(g):
    perm = cycle_cover(g)
    assert (perm is None) == (brute_force_cycle_cover(g) is None)
    if perm is not None:
        assert sorted(perm.values()) == list(range(1, g.n + 1))
        assert all(g.has_edge(alpha(i), alpha(j)) for i, j in perm.items())


@given(patterns(max_n=7))
@settings(max_examples=200, deadline=None)
def test_ensemble_condition_implies_structural(g):
    if structural_ensemble_controllable(g).verdict == HOLDS:
        assert structural_controllable(g).verdict == HOLDS


def test_witness_has_maximum_deficiency_and_is_maximal():
    # deficiency of the witness equals n minus the matching size, and it
    # contains every other set of that deficiency
    rng = random.Random(7)
    checked = 0
    for _ in range(300):
        g = random_pattern(rng, rng.randint(1, 6), rng.randint(1, 2), 0.3)
        res = hall_matching(g)
        if res.saturating:
            continue
        checked += 1
        w = res.deficiency_witness
        top = len(w) - len(in_neighbor_set(g, w))
        assert top == g.n - res.size
        for size in range(1, g.n + 1):
            for s in combinations(g.alpha_nodes, size):
                d = size - len(in_neighbor_set(g, s))
                assert d <= top
                if d == top:
                    assert set(s) <= w
    assert checked > 50


def test_brute_force_limit():
    g = SparsityPattern.from_edges(17, 1, [("b1", "a1")])
    with pytest.raises(ValueError):
        brute_force_hall(g)
    assert beta(1) in in_neighbor_set(g, [alpha(1)])
