import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from avgctrl.construction import (
    AVERAGED_CONTROLLABLE,
    Certificate,
    assign_monomials,
    averaged_rank_test,
    certificate_finding,
    check_root_tree,
    controllability_matrix,
    ell_sequence,
    is_compliant,
    monomial_certificate,
    random_compliant_pair,
    relabel_pattern,
    root_candidates,
)
from avgctrl.findings import HOLDS, REFUSED
from avgctrl.graph import SparsityPattern, alpha, beta
from avgctrl.poly import ONE, SIGMA, ZERO, PolyMatrix, RationalMatrix, monomial
from oracles import cofactor_det, sparse_hilbert_entries


@st.composite
def rooted_patterns(draw, max_n=7):
    """Self-looped, input-fed root with a random spanning tree and extra edges."""
    n = draw(st.integers(1, max_n))
    labels = draw(st.permutations(range(1, n + 1)))
    root = labels[0]
    edges = {(beta(1), alpha(root)), (alpha(root), alpha(root))}
    for k in range(1, n):
        parent = labels[draw(st.integers(0, k - 1))]
        edges.add((alpha(parent), alpha(labels[k])))
    extra = draw(st.lists(st.tuples(st.integers(1, n), st.integers(1, n)), max_size=n))
    edges |= {(alpha(i), alpha(j)) for i, j in extra}
    return SparsityPattern(n, 1, frozenset(edges))


def test_tree_six_certificate(tree_six):
    cert = monomial_certificate(tree_six)
    assert isinstance(cert, Certificate)
    part = cert.partition
    assert [[str(v) for v in c] for c in part.classes] == [["a1"], ["a2"], ["a3", "a4"], ["a5"], ["a6"]]
    assert cert.ells == (1, 2, 4, 5)
    degrees = {tuple(e["edge"]): e["degree"] for e in cert.edge_exponents()}
    assert degrees == {("a1", "a1"): 1, ("a1", "a2"): 2, ("a2", "a3"): 2, ("a2", "a4"): 3,
                       ("a3", "a5"): 3, ("a5", "a6"): 2, ("b1", "a1"): 0}
    assert cert.averaged_matrix == RationalMatrix(sparse_hilbert_entries(6, (1, 2, 4, 5)))
    assert cert.determinant == Fraction(71, 54432000) != 0
    assert cert.verdict == AVERAGED_CONTROLLABLE


def test_fan_certificate(fan):
    cert = monomial_certificate(fan)
    F = Fraction
    assert cert.averaged_matrix == RationalMatrix(
        [[1, F(1, 2), F(1, 3)], [0, F(1, 3), F(1, 4)], [0, F(1, 4), F(1, 5)]])
    assert cert.determinant == cofactor_det(cert.averaged_matrix.tolist()) == F(1, 240)
    assert cert.ells == (1,)
    assert cert.a == PolyMatrix([[SIGMA, ZERO, ZERO], [monomial(2), ZERO, ZERO],
                                 [monomial(3), ZERO, ZERO]])
    assert cert.b == PolyMatrix([[ONE], [ZERO], [ZERO]])
    f = certificate_finding(cert)
    assert f.verdict == HOLDS and f.witness["determinant"] == "1/240"


@pytest.mark.parametrize("edges, n, m, reason", [
    ([("b1", "a1"), ("a1", "a2")], 2, 1, "self-loop"),
    ([("b1", "a1"), ("a2", "a2"), ("a1", "a2")], 2, 1, "receives an edge"),
    ([("b1", "a1"), ("a1", "a1"), ("a2", "a1")], 2, 1, "reaches every"),
    ([("b1", "a1"), ("a1", "a1"), ("b2", "a2"), ("a1", "a2")], 2, 2, "one input"),
])
def test_refusals_name_the_gap(edges, n, m, reason):
    f = monomial_certificate(SparsityPattern.from_edges(n, m, edges))
    assert f.verdict == REFUSED and reason in f.note


def test_later_root_and_relabeling():
    # only a3 qualifies as root; BFS order a3, a1, a2
    g = SparsityPattern.from_edges(3, 1, [("b1", "a3"), ("a3", "a3"), ("a3", "a1"), ("a1", "a2")])
    assert root_candidates(g) == [alpha(3)]
    part = check_root_tree(g)
    assert part.relabeling == {3: 1, 1: 2, 2: 3}
    assert ell_sequence(part) == (1, 2)
    relabelled = relabel_pattern(g, part.relabeling)
    assert relabelled.has_edge(alpha(1), alpha(2)) and relabelled.has_edge(alpha(2), alpha(3))
    cert = monomial_certificate(g)
    a, b = cert.pair_in_original_labels()
    assert is_compliant(g, a, b)
    assert b.column(0) == (ZERO, ZERO, ONE)


def test_assign_monomials_checks_partition(fan, tree_six):
    with pytest.raises(ValueError):
        assign_monomials(tree_six, check_root_tree(fan))


def test_single_node():
    g = SparsityPattern.from_edges(1, 1, [("b1", "a1"), ("a1", "a1")])
    cert = monomial_certificate(g)
    assert cert.averaged_matrix == RationalMatrix([[1]]) and cert.ells == ()


@given(rooted_patterns())
@settings(max_examples=80, deadline=None)
def test_certificate_properties(g):
    cert = monomial_certificate(g)
    assert isinstance(cert, Certificate)
    n = g.n
    if n > 1:
        assert cert.averaged_matrix == RationalMatrix(sparse_hilbert_entries(n, cert.ells))
    # the relabelled pair is compliant with the relabelled pattern, the other with g
    assert is_compliant(relabel_pattern(g, cert.partition.relabeling), cert.a, cert.b)
    a, b = cert.pair_in_original_labels()
    assert is_compliant(g, a, b)
    assert all(p.is_monomial() for row in a for p in row if p)
    if cert.determinant != 0:
        assert averaged_rank_test(a, b).verdict == AVERAGED_CONTROLLABLE


def test_controllability_matrix_shape(fan):
    cert = monomial_certificate(fan)
    c = controllability_matrix(cert.a, cert.b)
    assert c.shape == (3, 3)
    assert c.column(1) == (SIGMA, monomial(2), monomial(3))
    assert c.column(2) == (monomial(2), monomial(3), monomial(4))
    with pytest.raises(ValueError):
        controllability_matrix(cert.b, cert.b)


def test_rank_test_constant_pairs():
    a = PolyMatrix([[0, 0], [1, 0]])
    b = PolyMatrix([[1], [0]])
    trace = averaged_rank_test(a, b)
    assert trace.verdict == AVERAGED_CONTROLLABLE and trace.ranks == [1, 2]
    stuck = averaged_rank_test(PolyMatrix([[0, 0], [0, 0]]), b, j_max=5)
    assert stuck.verdict == "inconclusive" and stuck.ranks == [1] * 6 and stuck.j_max == 5


def test_rank_test_beyond_n_powers():
    # sigma-dependence can make columns beyond A^(n-1) B matter
    a = PolyMatrix([[SIGMA, ZERO], [ZERO, SIGMA]])
    b = PolyMatrix([[ONE], [ONE]])
    assert averaged_rank_test(a, b).verdict != AVERAGED_CONTROLLABLE


def test_random_compliant_pair(dense_six):
    rng = random.Random(3)
    for _ in range(20):
        a, b = random_compliant_pair(dense_six, rng)
        assert is_compliant(dense_six, a, b)
        assert a.support() == {
            (v.index - 1, u.index - 1) for u, v in dense_six.edges if u.is_alpha}
        assert all(p.degree <= 5 for row in a for p in row if p)


@given(rooted_patterns(max_n=8))
@settings(max_examples=60, deadline=None)
def test_zero_structure_of_controllability_columns(g):
    cert = monomial_certificate(g)
    c = controllability_matrix(cert.a, cert.b)
    for j, ell in enumerate(cert.ells, start=1):
        assert all(not c[r, j - 1] for r in range(ell, g.n))


@pytest.mark.parametrize("n", [2, 5, 9, 12])
def test_star_root_gives_single_truncation(n):
    edges = [("b1", "a1"), ("a1", "a1")] + [("a1", f"a{i}") for i in range(2, n + 1)]
    cert = monomial_certificate(SparsityPattern.from_edges(n, 1, edges))
    assert cert.ells == (1,)
    from avgctrl.hilbert import verify_single_truncation
    assert cert.determinant == verify_single_truncation(n).dets[1] != 0


@pytest.mark.parametrize("seed", range(4))
def test_hilbert_identity_up_to_twelve(seed):
    rng = random.Random(seed)
    n = 9 + seed  # 9..12
    order = list(range(1, n + 1))
    rng.shuffle(order)
    edges = {("b1", f"a{order[0]}"), (f"a{order[0]}", f"a{order[0]}")}
    for k in range(1, n):
        edges.add((f"a{order[rng.randrange(k)]}", f"a{order[k]}"))
    g = SparsityPattern.from_edges(n, 1, sorted(edges))
    cert = monomial_certificate(g)
    assert cert.averaged_matrix == RationalMatrix(sparse_hilbert_entries(n, cert.ells))


@given(rooted_patterns(max_n=6))
@settings(max_examples=40, deadline=None)
def test_rank_test_finishes_within_n_steps(g):
    cert = monomial_certificate(g)
    if cert.determinant != 0:
        trace = averaged_rank_test(cert.a, cert.b)
        assert trace.verdict == AVERAGED_CONTROLLABLE and len(trace.ranks) <= g.n
