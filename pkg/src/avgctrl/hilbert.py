"""Hilbert matrices with truncated columns.

``H_n`` has entries ``1/(i+j-1)``.  For a non-decreasing sequence
``ells = (l_1, ..., l_g)`` with ``i <= l_i < n``, the *sparse Hilbert
matrix* ``H_n(ells)`` is ``H_n`` with column ``i`` set to zero below row
``l_i`` for ``i <= g``.  These are exactly the averaged controllability
matrices produced by the monomial construction, so their invertibility is
what certifies a pattern.

Single truncation of the first column is always invertible; the matrix
determinant lemma gives

    det H_n(l) = (1 - Z(l, n) / n**2) * det H_n,
    Z(l, n) = (-1)**l * (l+1)**2 * C(n, n-l-1) * C(n+l, n-1),

and ``|Z(., n)|`` is unimodal on ``1..n-1`` with its least value
``n**4 - n**2`` at ``l = 1``, which never equals ``n**2``.  Everything in
this module is exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, isqrt
from typing import Iterator, Sequence

from .poly import RationalMatrix, format_rational, rational_det

__all__ = [
    "hilbert",
    "hilbert_inverse_entry",
    "hilbert_inverse",
    "SparseHilbertSpec",
    "sparse_hilbert",
    "z_value",
    "tail_sum",
    "peak_index",
    "TruncationReport",
    "verify_single_truncation",
    "truncation_sequences",
    "ScanReport",
    "invertibility_scan",
    "BlockForm",
    "block_triangular_form",
]


def hilbert(n: int) -> RationalMatrix:
    if n < 1:
        raise ValueError("n must be positive")
    return RationalMatrix([[Fraction(1, i + j - 1) for j in range(1, n + 1)]
                           for i in range(1, n + 1)])


def hilbert_inverse_entry(n: int, i: int, j: int) -> int:
    """Entry ``(i, j)`` (1-based) of ``H_n^{-1}``, an integer."""
    if not (1 <= i <= n and 1 <= j <= n):
        raise IndexError(f"({i}, {j}) outside a {n}x{n} matrix")
    sign = -1 if (i + j) % 2 else 1
    return (sign * (i + j - 1) * comb(n + i - 1, n - j) * comb(n + j - 1, n - i)
            * comb(i + j - 2, i - 1) ** 2)


def hilbert_inverse(n: int) -> RationalMatrix:
    return RationalMatrix([[hilbert_inverse_entry(n, i, j) for j in range(1, n + 1)]
                           for i in range(1, n + 1)])


@dataclass(frozen=True)
class SparseHilbertSpec:
    n: int
    ells: tuple[int, ...]

    def __post_init__(self):
        ells = tuple(int(x) for x in self.ells)
        object.__setattr__(self, "ells", ells)
        if self.n < 2:
            raise ValueError(f"need n >= 2, got {self.n}")
        if not 1 <= len(ells) <= self.n:
            raise ValueError(f"need 1 <= len(ells) <= n, got {len(ells)}")
        for i, ell in enumerate(ells, start=1):
            if not i <= ell < self.n:
                raise ValueError(f"ells[{i}] = {ell} violates {i} <= l_{i} < {self.n}")
        if any(a > b for a, b in zip(ells, ells[1:])):
            raise ValueError(f"ells must be non-decreasing: {ells}")

    @property
    def gamma(self) -> int:
        return len(self.ells)


def sparse_hilbert(n: int | SparseHilbertSpec, ells: Sequence[int] | None = None) -> RationalMatrix:
    """``H_n(ells)``; accepts either a spec or ``(n, ells)``."""
    spec = n if isinstance(n, SparseHilbertSpec) else SparseHilbertSpec(n, tuple(ells))
    g, ells = spec.gamma, spec.ells
    return RationalMatrix([
        [Fraction(1, r + c - 1) if c > g or r <= ells[c - 1] else Fraction(0)
         for c in range(1, spec.n + 1)]
        for r in range(1, spec.n + 1)
    ])


def z_value(ell: int, n: int, method: str = "closed_form") -> Fraction:
    """``Z(ell, n)`` by the closed form or by the ratio recurrence."""
    if n < 2 or not 0 <= ell <= n - 1:
        raise ValueError(f"need n >= 2 and 0 <= ell <= n-1, got ell={ell}, n={n}")
    if method == "closed_form":
        sign = -1 if ell % 2 else 1
        return Fraction(sign * (ell + 1) ** 2 * comb(n, n - ell - 1) * comb(n + ell, n - 1))
    if method == "recurrence":
        z = Fraction(n * n)
        for k in range(1, ell + 1):
            z = -(Fraction(n * n, k * k) - 1) * z
        return z
    raise ValueError(f"unknown method {method!r}")


def tail_sum(ell: int, n: int) -> int:
    """``sum_{k=ell+1}^{n} (-1)^(k+1) C(n, n-k) C(n+k-1, n-1)``."""
    return sum((-1) ** (k + 1) * comb(n, n - k) * comb(n + k - 1, n - 1)
               for k in range(ell + 1, n + 1))


def peak_index(n: int) -> int:
    """``floor(n / sqrt(2))`` in integer arithmetic."""
    return isqrt(n * n // 2)


@dataclass
class TruncationReport:
    n: int
    det_hilbert: Fraction
    dets: dict[int, Fraction] = field(default_factory=dict)
    z: dict[int, Fraction] = field(default_factory=dict)
    peak: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "det_hilbert": format_rational(self.det_hilbert),
            "dets": {str(k): format_rational(v) for k, v in self.dets.items()},
            "z": {str(k): format_rational(v) for k, v in self.z.items()},
            "peak": self.peak,
            "violations": self.violations,
        }


def verify_single_truncation(n: int) -> TruncationReport:
    """Check every claim about ``H_n(l)``, ``l = 1..n-1``, exactly.

    Clauses: the determinant is nonzero; it equals ``(1 - Z/n^2) det H_n``;
    closed-form and recurrence ``Z`` agree and match the alternating tail
    sum; ``|Z|`` rises strictly up to ``peak_index(n)`` and falls after it,
    with its minimum at ``l = 1``.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    det_h = rational_det(hilbert(n))
    report = TruncationReport(n, det_h, peak=peak_index(n))
    bad = report.violations
    for ell in range(0, n):
        z = z_value(ell, n)
        report.z[ell] = z
        if z != z_value(ell, n, "recurrence"):
            bad.append(f"l={ell}: closed form and recurrence differ")
        if Fraction(tail_sum(ell, n)) != z / (n * n):
            bad.append(f"l={ell}: tail sum != Z/n^2")
    if report.z[0] != n * n:
        bad.append("Z(0, n) != n^2")
    for ell in range(1, n):
        d = rational_det(sparse_hilbert(n, (ell,)))
        report.dets[ell] = d
        if d == 0:
            bad.append(f"l={ell}: singular")
        if d != (1 - report.z[ell] / (n * n)) * det_h:
            bad.append(f"l={ell}: determinant lemma identity fails")
    mags = {ell: abs(report.z[ell]) for ell in range(0, n)}
    for ell in range(1, n):
        rising = mags[ell] > mags[ell - 1]
        if rising != (ell <= report.peak):
            bad.append(f"l={ell}: |Z| not unimodal around {report.peak}")
    inner = {ell: mags[ell] for ell in range(1, n)}
    if min(inner, key=lambda k: (inner[k], k)) != 1:
        bad.append("argmin |Z| over 1..n-1 is not 1")
    if mags[1] != n ** 4 - n ** 2:
        bad.append("|Z(1, n)| != n^4 - n^2")
    if mags[n - 1] != n * n * comb(2 * n - 1, n - 1):
        bad.append("|Z(n-1, n)| != n^2 C(2n-1, n-1)")
    return report


def truncation_sequences(n: int, gamma: int) -> Iterator[tuple[int, ...]]:
    """Non-decreasing ``(l_1..l_gamma)`` with ``i <= l_i < n``, lexicographic."""

    def extend(prefix: tuple[int, ...]):
        i = len(prefix) + 1
        if i > gamma:
            yield prefix
            return
        lo = max(i, prefix[-1] if prefix else 1)
        for ell in range(lo, n):
            yield from extend(prefix + (ell,))

    if gamma >= 1:
        yield from extend(())


@dataclass
class ScanReport:
    n: int
    counts: dict[int, int] = field(default_factory=dict)
    singular: list[tuple[int, ...]] = field(default_factory=list)
    min_abs_det: Fraction | None = None
    max_abs_det: Fraction | None = None
    min_at: tuple[int, ...] | None = None
    max_at: tuple[int, ...] | None = None
    block_recognized: int = 0
    block_disagreements: list[tuple[int, ...]] = field(default_factory=list)
    records: list[dict] = field(default_factory=list)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def summary(self) -> dict:
        fmt = lambda q: None if q is None else format_rational(q)
        return {
            "n": self.n,
            "counts": {str(g): c for g, c in sorted(self.counts.items())},
            "total": self.total,
            "singular": [list(s) for s in self.singular],
            "min_abs_det": fmt(self.min_abs_det), "min_at": self.min_at and list(self.min_at),
            "max_abs_det": fmt(self.max_abs_det), "max_at": self.max_at and list(self.max_at),
            "block_form_recognized": self.block_recognized,
            "block_form_disagreements": [list(s) for s in self.block_disagreements],
        }

    def jsonl(self) -> str:
        return "".join(json.dumps(r) + "\n" for r in self.records)


def invertibility_scan(n: int, gammas: Sequence[int] | None = None, limit: int = 8,
                       sink=None) -> ScanReport:
    """Exact determinant of every ``H_n(ells)`` for the given lengths.

    ``sink``, if given, receives one JSON-ready record per sequence as soon
    as it is computed, so a singular hit is never lost to a later crash.
    """
    if n > limit:
        raise ValueError(f"full enumeration limited to n <= {limit}, got {n}")
    if n < 2:
        raise ValueError("n must be at least 2")
    gammas = range(1, n + 1) if gammas is None else gammas
    report = ScanReport(n)
    for gamma in sorted(gammas):
        if not 1 <= gamma <= n:
            raise ValueError(f"gamma={gamma} outside 1..{n}")
        report.counts[gamma] = 0
        for ells in truncation_sequences(n, gamma):
            spec = SparseHilbertSpec(n, ells)
            det = rational_det(sparse_hilbert(spec))
            report.counts[gamma] += 1
            record = {"n": n, "ells": list(ells), "det": format_rational(det), "singular": det == 0}
            report.records.append(record)
            if sink is not None:
                sink(record)
            if det == 0:
                report.singular.append(ells)
            else:
                mag = abs(det)
                if report.min_abs_det is None or mag < report.min_abs_det:
                    report.min_abs_det, report.min_at = mag, ells
                if report.max_abs_det is None or mag > report.max_abs_det:
                    report.max_abs_det, report.max_at = mag, ells
            if block_triangular_form(spec) is not None:
                report.block_recognized += 1
                if det == 0:
                    report.block_disagreements.append(ells)
    return report


@dataclass(frozen=True)
class BlockForm:
    """Block upper-triangular split of a sparse Hilbert matrix.

    ``sizes[j]`` is the size of diagonal block ``j`` and ``truncations[j]``
    the number of leading nonzero rows in its first column; every other
    column of each diagonal block is a full Hilbert column.
    """

    sizes: tuple[int, ...]
    truncations: tuple[int, ...]


def _diagonal_block_truncation(m: RationalMatrix, start: int, stop: int) -> int | None:
    # first column: nonzero rows 0..p-1 then zeros; other columns full
    first = [m[r, start] for r in range(start, stop)]
    p = 0
    while p < len(first) and first[p] != 0:
        p += 1
    if p == 0 or any(x != 0 for x in first[p:]):
        return None
    for c in range(start + 1, stop):
        if any(m[r, c] == 0 for r in range(start, stop)):
            return None
    return p


def block_triangular_form(spec: SparseHilbertSpec) -> BlockForm | None:
    """Recognise a block upper-triangular layout with invertible diagonal blocks.

    Each diagonal block must be a principal block of ``H_n`` whose first
    column alone is truncated.  The finest block split allowed by the zero
    pattern is found first, then neighbouring blocks are merged left to
    right whenever the merged block still has that shape, giving the
    coarsest recognisable layout.  ``None`` means "not recognised", which
    is no evidence of singularity.
    """
    m = sparse_hilbert(spec)
    n = spec.n
    cuts = [s for s in range(1, n)
            if all(m[r, c] == 0 for r in range(s, n) for c in range(s))]
    bounds = [0] + cuts + [n]
    blocks = list(zip(bounds, bounds[1:]))
    if any(_diagonal_block_truncation(m, a, b) is None for a, b in blocks):
        return None
    merged = [blocks[0]]
    for a, b in blocks[1:]:
        start = merged[-1][0]
        if _diagonal_block_truncation(m, start, b) is not None:
            merged[-1] = (start, b)
        else:
            merged.append((a, b))
    sizes = tuple(b - a for a, b in merged)
    truncs = tuple(_diagonal_block_truncation(m, a, b) for a, b in merged)
    return BlockForm(sizes, truncs)
