"""Necessary conditions for structural averaged controllability.

All three tests here can only *refute*: a failure certifies that no pair
compliant with the pattern is averaged controllable, while a pass says
nothing.  Verdicts are therefore ``fails-necessary``, ``passes-necessary``
or ``inconclusive``.

Short-walk sets
    ``short(k)`` is the set of alpha-nodes that no walk of length greater
    than ``k`` from any beta-node reaches.  Rows of ``A^l B`` indexed by
    ``short(k)`` vanish for every compliant pair once ``l >= k``, while only
    ``m*k`` averaged columns come before that, so ``|short(k)| > m*k`` rules
    the pattern out.  ``k = 0`` is plain accessibility.

Acyclic traps
    A set ``S`` of alpha-nodes fed only from inside ``S`` and one beta-node,
    with fewer in-neighbours than members and no cycle inside ``S``, also
    rules the pattern out.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from math import ceil

from .findings import FAILS_NECESSARY, INCONCLUSIVE, PASSES_NECESSARY, Finding, node_names
from .graph import Node, SparsityPattern, alpha, beta, in_neighbor_set, walk_reach_closure

__all__ = [
    "ShortWalkProfile",
    "short_walk_set",
    "short_walk_profile",
    "walk_counting_test",
    "is_acyclic",
    "check_acyclic_trap",
    "acyclic_trap_search",
    "DEFAULT_TRAP_LIMIT",
]

DEFAULT_TRAP_LIMIT = int(os.environ.get("AVGCTRL_COROLLARY9_LIMIT", "20"))


def short_walk_set(g: SparsityPattern, k: int) -> frozenset[Node]:
    """Alpha-nodes with no walk of length > ``k`` from any beta-node."""
    return frozenset(set(g.alpha_nodes) - walk_reach_closure(g, k))


@dataclass(frozen=True)
class ShortWalkProfile:
    sets: tuple[tuple[int, frozenset], ...]
    stabilization_k: int

    def __getitem__(self, k: int) -> frozenset:
        if k >= len(self.sets):
            if len(self.sets) - 1 < self.stabilization_k:
                raise IndexError(f"k={k} beyond profile and before stabilization")
            return self.sets[-1][1]
        return self.sets[k][1]

    def sizes(self) -> list[int]:
        return [len(s) for _, s in self.sets]


def short_walk_profile(g: SparsityPattern, k_max: int | None = None) -> ShortWalkProfile:
    """``short(k)`` for ``k = 0..k_max`` and the step where it stops growing.

    The default ``k_max`` is ``ceil(n/m) + 1``.  The sets are nested and
    fixed from ``k = n`` on (a walk with more than ``n`` alpha-nodes repeats
    one, and then walks of every larger length exist as well).
    """
    if k_max is None:
        k_max = ceil(g.n / g.m) + 1
    sets = tuple((k, short_walk_set(g, k)) for k in range(k_max + 1))
    final = short_walk_set(g, g.n)
    stable = g.n
    while stable > 0 and short_walk_set(g, stable - 1) == final:
        stable -= 1
    return ShortWalkProfile(sets, stable)


def walk_counting_test(g: SparsityPattern) -> Finding:
    """Look for ``k`` in ``[0, ceil(n/m)]`` with ``|short(k)| > m*k``.

    The first such ``k`` is reported; larger ``k`` cannot violate the bound
    since ``|short(k)| <= n <= m*k``.
    """
    for k in range(0, ceil(g.n / g.m) + 1):
        members = short_walk_set(g, k)
        if len(members) > g.m * k:
            note = "not accessible" if k == 0 else "too many alpha-nodes starve of long walks"
            return Finding("walk-counting", FAILS_NECESSARY, {
                "k": k, "short_walk_nodes": node_names(members),
                "size": len(members), "bound": g.m * k,
            }, note=note)
    return Finding("walk-counting", PASSES_NECESSARY, {"k_max": ceil(g.n / g.m)})


def is_acyclic(g: SparsityPattern, subset) -> bool:
    """Whether the subgraph induced by ``subset`` (alpha-nodes) has no cycle."""
    subset = set(subset)
    indeg = {v: 0 for v in subset}
    for u in subset:
        for v in g.successors[u]:
            if v in subset:
                indeg[v] += 1
    stack = [v for v, d in indeg.items() if d == 0]
    removed = 0
    while stack:
        u = stack.pop()
        removed += 1
        for v in g.successors[u]:
            if v in subset:
                indeg[v] -= 1
                if indeg[v] == 0:
                    stack.append(v)
    return removed == len(subset)


def check_acyclic_trap(g: SparsityPattern, subset, beta_node: Node) -> bool:
    """Verify one candidate ``(subset, beta_node)`` for the acyclic-trap test."""
    subset = frozenset(Node(*v) for v in subset)
    if not subset or any(not v.is_alpha for v in subset):
        return False
    nin = in_neighbor_set(g, subset)
    if not nin <= subset | {beta_node}:
        return False
    return len(nin) < len(subset) and is_acyclic(g, subset)


def _trap_finding(g, subset, b, note="") -> Finding:
    return Finding("acyclic-trap", FAILS_NECESSARY, {
        "subset": node_names(subset), "beta": str(b),
        "in_neighbors": node_names(in_neighbor_set(g, subset)),
    }, note=note or "acyclic subset fed by one input with too few in-neighbours")


def acyclic_trap_search(g: SparsityPattern, limit: int | None = None) -> Finding:
    """Exhaustive search over alpha-subsets for an acyclic trap.

    Patterns with ``n > limit`` are not searched (verdict ``inconclusive``).
    Among all hits the smallest subset wins, ties broken lexicographically,
    and the lowest qualifying beta-node is named.
    """
    limit = DEFAULT_TRAP_LIMIT if limit is None else limit
    if g.n > limit:
        return Finding("acyclic-trap", INCONCLUSIVE, {"n": g.n, "limit": limit},
                       note="search skipped: pattern larger than subset-search limit")
    n = g.n
    # predecessor bitmasks: alpha i -> bit i-1, beta j -> bit n+j-1
    pred = []
    for i in range(1, n + 1):
        mask = 0
        for u in g.predecessors[alpha(i)]:
            mask |= 1 << (u.index - 1 if u.is_alpha else n + u.index - 1)
        pred.append(mask)
    alpha_all = (1 << n) - 1
    nin = [0] * (1 << n)
    best = None
    for s in range(1, 1 << n):
        low = s & -s
        nin[s] = nin[s ^ low] | pred[low.bit_length() - 1]
        mask = nin[s]
        outside = mask & alpha_all & ~s
        betas = mask >> n
        if outside or betas & (betas - 1):
            continue
        size = bin(s).count("1")
        if bin(mask).count("1") >= size:
            continue
        members = [alpha(i + 1) for i in range(n) if s >> i & 1]
        key = (size, [v.index for v in members])
        if best is not None and key >= best[0]:
            continue
        if is_acyclic(g, members):
            b = beta(betas.bit_length()) if betas else beta(1)
            best = (key, members, b)
    if best is None:
        return Finding("acyclic-trap", PASSES_NECESSARY, {"searched_subsets": (1 << n) - 1})
    _, members, b = best
    return _trap_finding(g, members, b)
