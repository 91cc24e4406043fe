"""Exact polynomials in sigma, polynomial matrices, and rational linear algebra.

Scalars are :class:`fractions.Fraction`.  Nothing here touches floating
point except :meth:`Polynomial.coefficients_array`, which exists for the
numeric simulator.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "Polynomial",
    "PolyMatrix",
    "RationalMatrix",
    "SIGMA",
    "ONE",
    "ZERO",
    "monomial",
    "poly_matmul",
    "integrate_unit",
    "integrate_matrix",
    "rational_rank",
    "rational_det",
    "format_rational",
    "parse_rational",
]


def format_rational(q) -> str:
    """Serialize as ``"p/q"``; integers keep an explicit ``/1``."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    return Fraction(str(text))


class Polynomial:
    """Univariate polynomial in sigma with exact rational coefficients.

    Stored sparsely as ``{degree: coefficient}`` without zero entries; the
    zero polynomial has degree ``-inf``.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, object] | None = None):
        clean = {}
        for deg, coeff in (terms or {}).items():
            deg = int(deg)
            if deg < 0:
                raise ValueError(f"negative degree {deg}")
            coeff = Fraction(coeff)
            if coeff:
                clean[deg] = coeff
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "Polynomial":
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    @property
    def degree(self) -> float:
        return max(self._terms) if self._terms else float("-inf")

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial({0: other})
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other) -> "Polynomial":
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for deg, c in other._terms.items():
            s = out.get(deg, 0) + c
            if s:
                out[deg] = s
            else:
                out.pop(deg, None)
        return Polynomial._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw({d: -c for d, c in self._terms.items()})

    def __sub__(self, other) -> "Polynomial":
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return _as_poly(other) - self

    def __mul__(self, other) -> "Polynomial":
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        if not self._terms or not other._terms:
            return ZERO
        out: dict[int, Fraction] = {}
        for d1, c1 in self._terms.items():
            for d2, c2 in other._terms.items():
                d = d1 + d2
                out[d] = out.get(d, 0) + c1 * c2
        return Polynomial._raw({d: c for d, c in out.items() if c})

    __rmul__ = __mul__

    def __call__(self, x):
        """Evaluate at ``x`` (exact for Fractions, vectorised for arrays)."""
        if isinstance(x, np.ndarray):
            return np.polynomial.polynomial.polyval(x, self.coefficients_array())
        return sum((c * x ** d for d, c in self._terms.items()), Fraction(0))

    def integrate_unit(self) -> Fraction:
        """Exact integral over [0, 1]."""
        return sum((c / (d + 1) for d, c in self._terms.items()), Fraction(0))

    def coefficients_array(self) -> np.ndarray:
        if not self._terms:
            return np.zeros(1)
        arr = np.zeros(max(self._terms) + 1)
        for d, c in self._terms.items():
            arr[d] = float(c)
        return arr

    def to_json(self) -> dict[str, str]:
        return {str(d): format_rational(c) for d, c in sorted(self._terms.items())}

    @classmethod
    def from_json(cls, data: Mapping[str, object]) -> "Polynomial":
        return cls({int(d): parse_rational(c) for d, c in data.items()})

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for d, c in sorted(self._terms.items()):
            if d == 0:
                parts.append(str(c))
            else:
                mono = "σ" if d == 1 else f"σ^{d}"
                parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts)


def _as_poly(x):
    if isinstance(x, Polynomial):
        return x
    if isinstance(x, (int, Fraction)):
        return Polynomial({0: x})
    return NotImplemented


ZERO = Polynomial()
ONE = Polynomial({0: 1})
SIGMA = Polynomial({1: 1})


def monomial(degree: int, coeff=1) -> Polynomial:
    return Polynomial({degree: coeff})


def integrate_unit(p: Polynomial) -> Fraction:
    return p.integrate_unit()


class _Grid:
    """Dense immutable 2-D grid; base for the two matrix types."""

    __slots__ = ("rows", "cols", "_data")
    _convert = staticmethod(lambda x: x)

    def __init__(self, data: Iterable[Iterable]):
        grid = tuple(tuple(self._convert(x) for x in row) for row in data)
        if not grid or not grid[0]:
            raise ValueError("matrices must have at least one row and column")
        width = len(grid[0])
        if any(len(row) != width for row in grid):
            raise ValueError("ragged matrix rows")
        self.rows, self.cols, self._data = len(grid), width, grid

    @classmethod
    def zeros(cls, rows: int, cols: int):
        zero = cls._convert(0)
        return cls([[zero] * cols for _ in range(rows)])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, idx):
        i, j = idx
        return self._data[i][j]

    def row(self, i: int) -> tuple:
        return self._data[i]

    def column(self, j: int) -> tuple:
        return tuple(row[j] for row in self._data)

    def tolist(self) -> list[list]:
        return [list(row) for row in self._data]

    def __iter__(self):
        return iter(self._data)

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self._data == other._data

    def __hash__(self) -> int:
        return hash(self._data)

    def transpose(self):
        return type(self)(zip(*self._data))

    def hstack(self, *others):
        blocks = (self,) + others
        if any(b.rows != self.rows for b in blocks):
            raise ValueError("hstack needs equal row counts")
        return type(self)([sum((b._data[i] for b in blocks), ()) for i in range(self.rows)])

    def permuted(self, row_perm: Sequence[int], col_perm: Sequence[int]):
        """Entry ``(i, j)`` of the result is entry ``(row_perm[i], col_perm[j])``."""
        return type(self)([[self._data[r][c] for c in col_perm] for r in row_perm])

    def __repr__(self) -> str:
        body = ",\n ".join("[" + ", ".join(str(x) for x in row) + "]" for row in self._data)
        return f"{type(self).__name__}([{body}])"


class PolyMatrix(_Grid):
    """Dense matrix of :class:`Polynomial` entries."""

    _convert = staticmethod(lambda x: x if isinstance(x, Polynomial) else Polynomial({0: x}))

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        return poly_matmul(self, other)

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return PolyMatrix([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self, other)])

    def support(self) -> set[tuple[int, int]]:
        """0-based ``(row, col)`` positions of nonzero entries."""
        return {(i, j) for i, row in enumerate(self) for j, p in enumerate(row) if p}

    def integrate(self) -> "RationalMatrix":
        return RationalMatrix([[p.integrate_unit() for p in row] for row in self])

    def evaluate(self, sigmas: np.ndarray) -> np.ndarray:
        """Float array of shape ``(len(sigmas), rows, cols)``."""
        sigmas = np.asarray(sigmas, dtype=float)
        out = np.empty((sigmas.size, self.rows, self.cols))
        for i, row in enumerate(self):
            for j, p in enumerate(row):
                out[:, i, j] = p(sigmas) if p else 0.0
        return out

    def to_json(self) -> list[list[dict[str, str]]]:
        return [[p.to_json() for p in row] for row in self]

    @classmethod
    def from_json(cls, data) -> "PolyMatrix":
        return cls([[Polynomial.from_json(p) if isinstance(p, dict) else p for p in row]
                    for row in data])

    @classmethod
    def identity(cls, n: int) -> "PolyMatrix":
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])


def poly_matmul(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    bt = list(zip(*b))
    out = []
    for row in a:
        new_row = []
        for col in bt:
            acc = ZERO
            for x, y in zip(row, col):
                if x and y:
                    acc = acc + x * y
            new_row.append(acc)
        out.append(new_row)
    return PolyMatrix(out)


def integrate_matrix(m: PolyMatrix) -> "RationalMatrix":
    return m.integrate()


class RationalMatrix(_Grid):
    """Dense matrix of exact rationals."""

    _convert = staticmethod(Fraction)

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise ValueError(f"dimension mismatch: {self.shape} @ {other.shape}")
        cols = list(zip(*other))
        return RationalMatrix([[sum((x * y for x, y in zip(row, col)), Fraction(0))
                                for col in cols] for row in self])

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        return RationalMatrix([[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(self, other)])

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    def rank(self) -> int:
        return rational_rank(self)

    def det(self) -> Fraction:
        return rational_det(self)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "RationalMatrix":
        return RationalMatrix([[self._data[r][c] for c in cols] for r in rows])

    def to_json(self) -> list[list[str]]:
        return [[format_rational(x) for x in row] for row in self]

    @classmethod
    def from_json(cls, data) -> "RationalMatrix":
        return cls([[parse_rational(x) for x in row] for row in data])

    def to_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self])


def _integer_rows(rows) -> tuple[list[list[int]], int]:
    """Scale each row by the lcm of its denominators.

    Returns the integer rows and the product of the scale factors.
    """
    out, scale = [], 1
    for row in rows:
        f = lcm(*(Fraction(x).denominator for x in row))
        out.append([int(Fraction(x) * f) for x in row])
        scale *= f
    return out, scale


def _bareiss(a: list[list[int]], square: bool) -> tuple[int, int]:
    """Fraction-free elimination in place; returns ``(rank, signed det)``.

    ``det`` is meaningful only when ``square`` and rank is full.
    """
    rows, cols = len(a), len(a[0])
    prev, sign, r = 1, 1, 0
    for c in range(cols):
        if r == rows:
            break
        pivot = next((i for i in range(r, rows) if a[i][c]), None)
        if pivot is None:
            if square:
                return r, 0
            continue
        if pivot != r:
            a[r], a[pivot] = a[pivot], a[r]
            sign = -sign
        p = a[r][c]
        for i in range(r + 1, rows):
            ai = a[i]
            f = ai[c]
            ar = a[r]
            for j in range(c + 1, cols):
                ai[j] = (p * ai[j] - f * ar[j]) // prev
            ai[c] = 0
        prev = p
        r += 1
    det = sign * a[rows - 1][cols - 1] if square and r == rows else 0
    return r, det


def rational_rank(m: RationalMatrix) -> int:
    rows, _ = _integer_rows(m)
    if not any(any(row) for row in rows):
        return 0
    rank, _ = _bareiss(rows, square=False)
    return rank


def rational_det(m: RationalMatrix) -> Fraction:
    if m.rows != m.cols:
        raise ValueError(f"determinant needs a square matrix, got {m.shape}")
    rows, scale = _integer_rows(m)
    _, det = _bareiss(rows, square=True)
    return Fraction(det, scale)
