from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from avgctrl.poly import (
    ONE,
    SIGMA,
    ZERO,
    PolyMatrix,
    Polynomial,
    RationalMatrix,
    format_rational,
    monomial,
    parse_rational,
    rational_det,
    rational_rank,
)
from oracles import cofactor_det

fractions_ = st.fractions(min_value=-5, max_value=5, max_denominator=7)
polys = st.dictionaries(st.integers(0, 6), fractions_, max_size=4).map(Polynomial)


def test_rational_format():
    assert format_rational(3) == "3/1"
    assert format_rational(Fraction(-2, 4)) == "-1/2"
    assert parse_rational("-1/2") == Fraction(-1, 2)
    assert parse_rational(4) == 4


def test_polynomial_basics():
    p = 2 * SIGMA * SIGMA + 1
    assert p.terms == {0: 1, 2: 2}
    assert p.degree == 2 and ZERO.degree == float("-inf")
    assert p(Fraction(1, 2)) == Fraction(3, 2)
    assert np.allclose(p(np.array([0.0, 1.0])), [1.0, 3.0])
    assert p.integrate_unit() == Fraction(5, 3)
    assert monomial(3, -2).is_monomial() and not p.is_monomial()
    assert p - p == ZERO and not (p - p)
    assert Polynomial({1: 0}) == ZERO
    assert Polynomial.from_json(p.to_json()) == p
    with pytest.raises(ValueError):
        Polynomial({-1: 1})


@given(polys, polys, polys)
@settings(max_examples=100, deadline=None)
def test_ring_laws(p, q, r):
    assert (p + q) * r == p * r + q * r
    assert (p * q) * r == p * (q * r)
    assert p * q == q * p
    x = Fraction(3, 7)
    assert (p * q)(x) == p(x) * q(x)
    assert (p + q).integrate_unit() == p.integrate_unit() + q.integrate_unit()


def test_poly_matrix_product_and_integral():
    a = PolyMatrix([[SIGMA, ZERO], [ONE, SIGMA]])
    b = PolyMatrix([[ONE], [ZERO]])
    ab = a @ b
    assert ab.column(0) == (SIGMA, ONE)
    assert (a @ a)[1, 0] == 2 * SIGMA
    assert ab.integrate() == RationalMatrix([[Fraction(1, 2)], [1]])
    assert a.support() == {(0, 0), (1, 0), (1, 1)}
    assert PolyMatrix.from_json(a.to_json()) == a
    assert (a + PolyMatrix.identity(2))[0, 0] == SIGMA + 1
    vals = a.evaluate(np.array([0.5, 2.0]))
    assert vals.shape == (2, 2, 2) and vals[1, 1, 1] == 2.0
    with pytest.raises(ValueError):
        b @ a


square = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(fractions_, min_size=n, max_size=n), min_size=n, max_size=n))


@given(square)
@settings(max_examples=150, deadline=None)
def test_bareiss_matches_cofactor_expansion(rows):
    m = RationalMatrix(rows)
    assert rational_det(m) == cofactor_det(rows)
    assert m.det() == rational_det(m)


@given(square)
@settings(max_examples=100, deadline=None)
def test_rank_matches_numpy_on_generic_scale(rows):
    m = RationalMatrix(rows)
    r = rational_rank(m)
    assert (r == len(rows)) == (cofactor_det(rows) != 0)
    # duplicating rows never raises the rank
    assert rational_rank(RationalMatrix(rows + rows)) == r


def test_rank_examples():
    assert RationalMatrix([[1, 2], [2, 4]]).rank() == 1
    assert RationalMatrix([[0, 0], [0, 0]]).rank() == 0
    assert RationalMatrix([[1, 2, 3]]).rank() == 1
    m = RationalMatrix([[1, 2], [3, 4]])
    assert m.det() == -2
    assert (m @ RationalMatrix.identity(2)) == m
    assert (m - m) == RationalMatrix.zeros(2, 2)
    assert m.submatrix([1], [0, 1]) == RationalMatrix([[3, 4]])
    assert RationalMatrix.from_json(m.to_json()) == m
    assert m.transpose()[0, 1] == 3
    assert np.allclose(m.to_float(), [[1, 2], [3, 4]])


@given(polys, polys)
@settings(max_examples=100, deadline=None)
def test_exact_cancellation(p, q):
    assert (p + q) - q == p


def test_monomial_integrals_exact():
    assert all(monomial(k).integrate_unit() * (k + 1) == 1 for k in range(201))


@given(square)
@settings(max_examples=60, deadline=None)
def test_repeated_row_is_singular(rows):
    if len(rows) > 1:
        rows = [rows[0]] + rows[1:-1] + [rows[0]]
        assert rational_det(RationalMatrix(rows)) == 0
        assert rational_rank(RationalMatrix(rows)) < len(rows)


poly_matrices = st.lists(st.lists(
    st.dictionaries(st.integers(0, 4), st.integers(-3, 3), max_size=3).map(Polynomial),
    min_size=3, max_size=3), min_size=3, max_size=3).map(PolyMatrix)


@given(poly_matrices, poly_matrices, poly_matrices)
@settings(max_examples=40, deadline=None)
def test_poly_matmul_associative(a, b, c):
    assert (a @ b) @ c == a @ (b @ c)
