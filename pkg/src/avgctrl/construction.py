"""Constructive certificates of structural averaged controllability.

For a single-input pattern with a self-looped root ``r`` fed by the input
and spanning the alpha-subgraph, a breadth-first spanning tree from ``r``
splits the states into depth classes.  After relabelling states by depth
(root first), the pair

* ``b_1 = 1``, ``a_11 = sigma`` on the root self-loop,
* ``a_ji = sigma**(j - i + 1)`` on every tree edge ``i -> j``,
* every other entry zero,

has controllability matrix entries ``C_ij = sigma**(i+j-2)`` when
``depth(i) < j`` and 0 otherwise.  Integrating over [0, 1] gives the sparse
Hilbert matrix ``H_n(l_1..l_p)`` with ``l_j = 1 + |depth 1| + ... +
|depth j-1|``; a nonzero determinant certifies the pattern.

The module also carries the general averaged rank test: the span of
``int_0^1 A^j B`` over ``j >= 0`` must be all of ``R^n``.
"""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .findings import HOLDS, INCONCLUSIVE, REFUSED, Finding
from .graph import Node, SparsityPattern, alpha, beta
from .graph import to_json as pattern_json
from .hilbert import hilbert, sparse_hilbert
from .poly import (
    ONE,
    SIGMA,
    ZERO,
    PolyMatrix,
    RationalMatrix,
    format_rational,
    monomial,
    poly_matmul,
    rational_det,
)

__all__ = [
    "DepthPartition",
    "check_root_tree",
    "root_candidates",
    "ell_sequence",
    "relabel_pattern",
    "assign_monomials",
    "controllability_matrix",
    "Certificate",
    "monomial_certificate",
    "certificate_finding",
    "is_compliant",
    "RankTrace",
    "averaged_rank_test",
    "random_compliant_pair",
    "AVERAGED_CONTROLLABLE",
]

AVERAGED_CONTROLLABLE = "averaged-controllable"


@dataclass(frozen=True)
class DepthPartition:
    """Breadth-first spanning tree of the alpha-subgraph and its depth classes.

    Nodes are in the pattern's original labels; ``relabeling`` maps each
    original alpha index to its new index (root -> 1, then by depth, ties by
    original index).
    """

    root: Node
    tree_edges: tuple[tuple[Node, Node], ...]
    depth_of: dict
    classes: tuple[tuple[Node, ...], ...]
    relabeling: dict

    @property
    def max_depth(self) -> int:
        return len(self.classes) - 1

    def parent_of(self) -> dict:
        return {child: parent for parent, child in self.tree_edges}


def root_candidates(g: SparsityPattern) -> list[Node]:
    """Self-looped alpha-nodes fed directly by the (single) input, ascending."""
    if g.m != 1:
        return []
    return [a for a in g.alpha_nodes
            if g.has_edge(a, a) and g.has_edge(beta(1), a)]


def _bfs_partition(g: SparsityPattern, root: Node) -> DepthPartition | None:
    depth = {root: 0}
    tree = []
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in g.successors[u]:
            if v.is_alpha and v not in depth:
                depth[v] = depth[u] + 1
                tree.append((u, v))
                queue.append(v)
    if len(depth) < g.n:
        return None
    p = max(depth.values())
    classes = tuple(tuple(sorted(v for v, d in depth.items() if d == k)) for k in range(p + 1))
    order = [v for cls in classes for v in cls]
    relabeling = {v.index: k for k, v in enumerate(order, start=1)}
    return DepthPartition(root, tuple(tree), depth, classes, relabeling)


def _assumption_failure(g: SparsityPattern) -> str | None:
    if g.m != 1:
        return f"needs exactly one input node, pattern has {g.m}"
    loops = [a for a in g.alpha_nodes if g.has_edge(a, a)]
    if not loops:
        return "no alpha-node carries a self-loop"
    fed = [a for a in loops if g.has_edge(beta(1), a)]
    if not fed:
        return "no self-looped alpha-node receives an edge from the input"
    return "no self-looped, input-fed alpha-node reaches every alpha-node"


def check_root_tree(g: SparsityPattern) -> DepthPartition | None:
    """First root (ascending index) meeting the tree hypothesis, with its BFS tree."""
    for r in root_candidates(g):
        part = _bfs_partition(g, r)
        if part is not None:
            return part
    return None


def ell_sequence(partition: DepthPartition) -> tuple[int, ...]:
    """``l_j = 1 + sum_{k=1}^{j-1} |class k|`` for ``j = 1..max_depth``."""
    sizes = [len(c) for c in partition.classes]
    return tuple(1 + sum(sizes[1:j]) for j in range(1, partition.max_depth + 1))


def relabel_pattern(g: SparsityPattern, relabeling: dict) -> SparsityPattern:
    def f(v: Node) -> Node:
        return alpha(relabeling[v.index]) if v.is_alpha else v
    return SparsityPattern(g.n, g.m, frozenset((f(u), f(v)) for u, v in g.edges))


def assign_monomials(g: SparsityPattern, partition: DepthPartition) -> tuple[PolyMatrix, PolyMatrix]:
    """The monomial pair, in relabelled coordinates.

    Raises ValueError if ``partition`` does not witness the tree hypothesis
    for ``g``.
    """
    root = partition.root
    if g.m != 1 or not g.has_edge(root, root) or not g.has_edge(beta(1), root):
        raise ValueError(f"{root} is not a self-looped, input-fed root of this pattern")
    for u, v in partition.tree_edges:
        if not g.has_edge(u, v):
            raise ValueError(f"tree edge {u} -> {v} is not in the pattern")
    if len(partition.depth_of) != g.n:
        raise ValueError("partition does not span all alpha-nodes")
    new = partition.relabeling
    n = g.n
    a = [[ZERO] * n for _ in range(n)]
    a[0][0] = SIGMA
    for u, v in partition.tree_edges:
        i, j = new[u.index], new[v.index]
        a[j - 1][i - 1] = monomial(j - i + 1)
    b = [[ONE]] + [[ZERO] for _ in range(n - 1)]
    return PolyMatrix(a), PolyMatrix(b)


def controllability_matrix(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    """``[B, AB, ..., A^(n-1) B]`` computed exactly."""
    n = a.rows
    if a.cols != n or b.rows != n:
        raise ValueError(f"need square A (n x n) and B (n x m); got {a.shape}, {b.shape}")
    blocks = [b]
    for _ in range(n - 1):
        blocks.append(poly_matmul(a, blocks[-1]))
    return blocks[0].hstack(*blocks[1:])


def is_compliant(g: SparsityPattern, a: PolyMatrix, b: PolyMatrix) -> bool:
    """Every nonzero entry of ``(A, B)`` sits on an edge of ``g``."""
    if a.shape != (g.n, g.n) or b.shape != (g.n, g.m):
        return False
    for j, i in a.support():
        if not g.has_edge(alpha(i + 1), alpha(j + 1)):
            return False
    for j, i in b.support():
        if not g.has_edge(beta(i + 1), alpha(j + 1)):
            return False
    return True


@dataclass
class Certificate:
    pattern: SparsityPattern
    partition: DepthPartition
    ells: tuple[int, ...]
    a: PolyMatrix
    b: PolyMatrix
    averaged_matrix: RationalMatrix
    determinant: Fraction
    verdict: str

    def pair_in_original_labels(self) -> tuple[PolyMatrix, PolyMatrix]:
        """``(A, B)`` permuted back to the pattern's own state numbering."""
        new = self.partition.relabeling
        order = [new[i] - 1 for i in range(1, self.pattern.n + 1)]
        return self.a.permuted(order, order), self.b.permuted(order, range(self.b.cols))

    def edge_exponents(self) -> list[dict]:
        """Monomial per original edge: ``{"edge": [tail, head], "degree": d}``."""
        a, b = self.pair_in_original_labels()
        out = []
        for u, v in self.pattern.sorted_edges():
            p = (a[v.index - 1, u.index - 1] if u.is_alpha else b[v.index - 1, u.index - 1])
            if p:
                (deg,) = p.terms
                out.append({"edge": [str(u), str(v)], "degree": deg})
        return out

    def to_json(self) -> dict:
        return {
            "pattern": json.loads(pattern_json(self.pattern)),
            "root": str(self.partition.root),
            "relabeling": {f"a{k}": f"a{v}" for k, v in sorted(self.partition.relabeling.items())},
            "classes": [[str(v) for v in c] for c in self.partition.classes],
            "ells": list(self.ells),
            "monomials": self.edge_exponents(),
            "averaged_matrix": self.averaged_matrix.to_json(),
            "determinant": format_rational(self.determinant),
            "verdict": self.verdict,
        }


def _certificate_for(g: SparsityPattern, part: DepthPartition) -> Certificate:
    a, b = assign_monomials(g, part)
    averaged = controllability_matrix(a, b).integrate()
    ells = ell_sequence(part)
    expected = hilbert(1) if g.n == 1 else sparse_hilbert(g.n, ells)
    if averaged != expected:
        raise AssertionError(f"averaged matrix differs from H_{g.n}{ells}")
    det = rational_det(averaged)
    verdict = AVERAGED_CONTROLLABLE if det != 0 else INCONCLUSIVE
    return Certificate(g, part, ells, a, b, averaged, det, verdict)


def monomial_certificate(g: SparsityPattern) -> Certificate | Finding:
    """Build the monomial certificate, or a ``refused`` Finding naming the gap.

    Every admissible root is tried in ascending order and the first with a
    nonzero determinant wins.  If all are singular the first is returned
    with verdict ``inconclusive``; singularity is never a refutation.
    """
    parts = [p for p in (_bfs_partition(g, r) for r in root_candidates(g)) if p is not None]
    if not parts:
        return Finding("monomial-certificate", REFUSED, {},
                       note=_assumption_failure(g))
    first = None
    for part in parts:
        cert = _certificate_for(g, part)
        if cert.determinant != 0:
            return cert
        first = first or cert
    return first


def certificate_finding(result: Certificate | Finding) -> Finding:
    if isinstance(result, Finding):
        return result
    verdict = HOLDS if result.verdict == AVERAGED_CONTROLLABLE else INCONCLUSIVE
    witness = {
        "root": str(result.partition.root),
        "ells": list(result.ells),
        "determinant": format_rational(result.determinant),
        "averaged_matrix": result.averaged_matrix.to_json(),
    }
    note = "" if verdict == HOLDS else "sparse Hilbert matrix singular for every admissible root"
    return Finding("monomial-certificate", verdict, witness, note=note)


# -- general averaged rank test ---------------------------------------------

@dataclass
class RankTrace:
    verdict: str
    ranks: list[int] = field(default_factory=list)
    j_max: int = 0

    @property
    def rank(self) -> int:
        return self.ranks[-1] if self.ranks else 0


class _EchelonBasis:
    """Incrementally maintained row-echelon basis over the rationals."""

    def __init__(self, n: int):
        self.n = n
        self.rows: dict[int, list[Fraction]] = {}  # pivot column -> normalised vector

    def add(self, vec) -> bool:
        v = [Fraction(x) for x in vec]
        for piv, row in self.rows.items():
            c = v[piv]
            if c:
                for k in range(piv, self.n):
                    if row[k]:
                        v[k] -= c * row[k]
        lead = next((k for k in range(self.n) if v[k]), None)
        if lead is None:
            return False
        inv = 1 / v[lead]
        v = [x * inv for x in v]
        for piv, row in self.rows.items():
            c = row[lead]
            if c:
                self.rows[piv] = [x - c * y for x, y in zip(row, v)]
        self.rows[lead] = v
        return True

    def __len__(self) -> int:
        return len(self.rows)


def averaged_rank_test(a: PolyMatrix, b: PolyMatrix, j_max: int | None = None) -> RankTrace:
    """Rank of ``int A^j B`` columns accumulated over ``j = 0..j_max``.

    Stops as soon as the rank reaches ``n``.  Since averaging does not
    commute with Cayley-Hamilton there is no a-priori cutoff, so running
    out of ``j`` gives ``inconclusive``, not a negative answer.
    """
    n = a.rows
    if a.cols != n or b.rows != n:
        raise ValueError(f"need square A (n x n) and B (n x m); got {a.shape}, {b.shape}")
    j_max = 4 * n if j_max is None else j_max
    basis = _EchelonBasis(n)
    trace = RankTrace(INCONCLUSIVE, j_max=j_max)
    block = b
    for j in range(j_max + 1):
        if j:
            block = poly_matmul(a, block)
        averaged = block.integrate()
        for c in range(averaged.cols):
            if len(basis) < n:
                basis.add(averaged.column(c))
        trace.ranks.append(len(basis))
        if len(basis) == n:
            trace.verdict = AVERAGED_CONTROLLABLE
            break
    return trace


def random_compliant_pair(g: SparsityPattern, rng: random.Random, max_degree: int = 5,
                          coeffs=(-3, -2, -1, 1, 2, 3)) -> tuple[PolyMatrix, PolyMatrix]:
    """Random nonzero monomial ``c * sigma**d`` on every edge of ``g``."""
    a = [[ZERO] * g.n for _ in range(g.n)]
    b = [[ZERO] * g.m for _ in range(g.n)]
    for u, v in g.sorted_edges():
        p = monomial(rng.randint(0, max_degree), rng.choice(coeffs))
        if u.is_alpha:
            a[v.index - 1][u.index - 1] = p
        else:
            b[v.index - 1][u.index - 1] = p
    return PolyMatrix(a), PolyMatrix(b)
