"""Structural and structural-ensemble controllability via bipartite matching.

Both classical tests reduce to matchings on the pattern graph:

* structural controllability needs accessibility plus Hall's condition
  ``|N_in(V')| >= |V'|`` for every set of alpha-nodes, i.e. a matching of
  every alpha-node to a distinct in-neighbour;
* structural ensemble controllability needs accessibility plus a cover of
  the alpha-nodes by disjoint directed cycles, i.e. a perfect matching of
  alpha-nodes to alpha-successors.

Brute-force versions of both conditions are kept as test oracles.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable, Iterable, Mapping

from .findings import FAILS, HOLDS, Finding, node_names
from .graph import SparsityPattern, accessible, alpha, in_neighbor_set

__all__ = [
    "MatchingResult",
    "max_bipartite_matching",
    "hall_matching",
    "structural_controllable",
    "cycle_cover",
    "structural_ensemble_controllable",
    "brute_force_hall",
    "brute_force_cycle_cover",
    "permutation_cycles",
]


@dataclass
class MatchingResult:
    size: int
    pairs: dict = field(default_factory=dict)  # left -> right
    deficiency_witness: frozenset | None = None

    @property
    def saturating(self) -> bool:
        return self.deficiency_witness is None


def max_bipartite_matching(
    left: Iterable[Hashable],
    right: Iterable[Hashable],
    adjacency: Mapping[Hashable, Iterable[Hashable]],
) -> MatchingResult:
    """Maximum matching by Hopcroft-Karp, plus a Hall violator if not saturating.

    ``adjacency[u]`` lists the right vertices adjacent to left vertex ``u``;
    entries outside ``right`` are ignored.  When the matching leaves some
    left vertex free, the witness is every left vertex that alternating paths
    from free right vertices cannot reach.  Its neighbours are all matched
    into the set itself, which also holds the free left vertices, so the
    neighbourhood is strictly smaller than the set.
    """
    left = sorted(left)
    right_set = set(right)
    adj = {u: sorted(v for v in adjacency.get(u, ()) if v in right_set) for u in left}
    match_l: dict = {}
    match_r: dict = {}
    inf = float("inf")

    def bfs() -> bool:
        dist.clear()
        queue = deque()
        for u in left:
            if u not in match_l:
                dist[u] = 0
                queue.append(u)
        found = False
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                w = match_r.get(v)
                if w is None:
                    found = True
                elif w not in dist:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(u) -> bool:
        for v in adj[u]:
            w = match_r.get(v)
            if w is None or (dist.get(w, inf) == dist[u] + 1 and dfs(w)):
                match_l[u] = v
                match_r[v] = u
                return True
        dist[u] = inf
        return False

    dist: dict = {}
    while bfs():
        for u in left:
            if u not in match_l:
                dfs(u)

    witness = None
    if len(match_l) < len(left):
        # Left vertices reachable by alternating paths from free right
        # vertices; everything else is the largest maximally deficient set.
        radj: dict = {}
        for u in left:
            for v in adj[u]:
                radj.setdefault(v, []).append(u)
        free_right = [v for v in sorted(right_set) if v not in match_r]
        reached_right = set(free_right)
        reached_left: set = set()
        queue = deque(free_right)
        while queue:
            v = queue.popleft()
            for u in radj.get(v, ()):
                if u in reached_left:
                    continue
                reached_left.add(u)
                w = match_l[u]  # u is matched, else an augmenting path exists
                if w not in reached_right:
                    reached_right.add(w)
                    queue.append(w)
        witness = frozenset(u for u in left if u not in reached_left)
    return MatchingResult(len(match_l), dict(match_l), witness)


def hall_matching(g: SparsityPattern) -> MatchingResult:
    """Match each alpha-node to a distinct in-neighbour (any node of ``g``)."""
    return max_bipartite_matching(g.alpha_nodes, g.nodes, g.predecessors)


def structural_controllable(g: SparsityPattern) -> Finding:
    ok, unreachable = accessible(g)
    if not ok:
        return Finding("structural", FAILS, {"unreachable": node_names(unreachable)},
                       note="not accessible from the input nodes")
    result = hall_matching(g)
    if not result.saturating:
        deficient = result.deficiency_witness
        return Finding("structural", FAILS, {
            "deficient_set": node_names(deficient),
            "in_neighbors": node_names(in_neighbor_set(g, deficient)),
        }, note="Hall condition violated")
    pairs = {str(v): str(u) for v, u in sorted(result.pairs.items())}
    return Finding("structural", HOLDS, {"matching": pairs})


def permutation_cycles(perm: Mapping[int, int]) -> list[list[int]]:
    """Cycles of a permutation on its keys, each starting at its least element."""
    cycles, seen = [], set()
    for start in sorted(perm):
        if start in seen:
            continue
        cycle, i = [], start
        while i not in seen:
            seen.add(i)
            cycle.append(i)
            i = perm[i]
        cycles.append(cycle)
    return cycles


def cycle_cover(g: SparsityPattern) -> dict[int, int] | None:
    """Successor permutation ``i -> j`` using alpha-alpha edges, or None."""
    succ = {u: [v for v in g.successors[u] if v.is_alpha] for u in g.alpha_nodes}
    result = max_bipartite_matching(g.alpha_nodes, g.alpha_nodes, succ)
    if not result.saturating:
        return None
    return {u.index: v.index for u, v in result.pairs.items()}


def structural_ensemble_controllable(g: SparsityPattern) -> Finding:
    ok, unreachable = accessible(g)
    if not ok:
        return Finding("structural-ensemble", FAILS, {"unreachable": node_names(unreachable)},
                       note="not accessible from the input nodes")
    perm = cycle_cover(g)
    if perm is None:
        return Finding("structural-ensemble", FAILS, {},
                       note="alpha-subgraph has no disjoint cycle cover")
    cycles = [[f"a{i}" for i in c] for c in permutation_cycles(perm)]
    return Finding("structural-ensemble", HOLDS, {"cycles": cycles})


def brute_force_hall(g: SparsityPattern, limit: int = 16) -> tuple[bool, frozenset | None]:
    """Check Hall's condition over all subsets of alpha-nodes.

    Returns ``(ok, first_violator)``; subsets are visited by size, then
    lexicographically.
    """
    if g.n > limit:
        raise ValueError(f"brute-force Hall check limited to n <= {limit}, got {g.n}")
    for size in range(1, g.n + 1):
        for subset in combinations(g.alpha_nodes, size):
            if len(in_neighbor_set(g, subset)) < size:
                return False, frozenset(subset)
    return True, None


def brute_force_cycle_cover(g: SparsityPattern) -> dict[int, int] | None:
    """Exhaustive backtracking search for a cycle cover of the alpha-subgraph."""
    succ = {i: sorted(v.index for v in g.successors[alpha(i)] if v.is_alpha)
            for i in range(1, g.n + 1)}
    perm: dict[int, int] = {}
    used: set[int] = set()

    def extend(i: int) -> bool:
        if i > g.n:
            return True
        for j in succ[i]:
            if j not in used:
                perm[i] = j
                used.add(j)
                if extend(i + 1):
                    return True
                used.discard(j)
                del perm[i]
        return False

    return dict(perm) if extend(1) else None

