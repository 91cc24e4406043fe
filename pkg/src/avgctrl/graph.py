"""Sparsity patterns of ensemble pairs ``(A, B)`` as directed graphs.

A pattern has ``n`` state nodes ``a1..an`` and ``m`` input nodes
``b1..bm``.  An edge ``ai -> aj`` means entry ``(j, i)`` of ``A`` may be
nonzero; ``bi -> aj`` means entry ``(j, i)`` of ``B`` may be nonzero.
Input nodes never receive edges.
"""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple

__all__ = [
    "Node",
    "PatternError",
    "SparsityPattern",
    "alpha",
    "beta",
    "parse_node",
    "parse_pattern",
    "load_pattern",
    "to_json",
    "to_dot",
    "in_neighbor_set",
    "accessible",
    "walk_reach_closure",
]

_NODE_RE = re.compile(r"^([ab])([0-9]+)$")


class PatternError(ValueError):
    """Raised for malformed or invalid sparsity patterns."""


class Node(NamedTuple):
    """A graph node: ``kind`` is ``"a"`` (state) or ``"b"`` (input), 1-based."""

    kind: str
    index: int

    @property
    def is_alpha(self) -> bool:
        return self.kind == "a"

    @property
    def is_beta(self) -> bool:
        return self.kind == "b"

    def __str__(self) -> str:
        return f"{self.kind}{self.index}"


def alpha(i: int) -> Node:
    return Node("a", i)


def beta(j: int) -> Node:
    return Node("b", j)


def parse_node(name: str) -> Node:
    match = _NODE_RE.match(name.strip())
    if not match:
        raise PatternError(f"bad node name {name!r}; expected a<i> or b<j>")
    index = int(match.group(2))
    if index < 1:
        raise PatternError(f"node index must be positive: {name!r}")
    return Node(match.group(1), index)


@dataclass(frozen=True)
class SparsityPattern:
    """Directed graph on ``n`` alpha-nodes and ``m`` beta-nodes.

    Construction validates every invariant; instances are immutable.
    """

    n: int
    m: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise PatternError(f"need n >= 1 and m >= 1, got n={self.n}, m={self.m}")
        edges = frozenset((Node(*u), Node(*v)) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        for u, v in edges:
            for node in (u, v):
                self._check_node(node)
            if v.is_beta:
                raise PatternError(f"incoming edge to β-node: {u} -> {v}")

    @classmethod
    def from_edges(cls, n: int, m: int, edges: Iterable) -> "SparsityPattern":
        """Build from ``(tail, head)`` pairs given as nodes or names like ``"a1"``.

        Duplicate edges are rejected.
        """
        seen = []
        for k, (u, v) in enumerate(edges):
            u = parse_node(u) if isinstance(u, str) else Node(*u)
            v = parse_node(v) if isinstance(v, str) else Node(*v)
            if (u, v) in seen:
                raise PatternError(f"duplicate edge {u} -> {v} (edge #{k})")
            seen.append((u, v))
        return cls(n, m, frozenset(seen))

    def _check_node(self, node: Node):
        limit = self.n if node.is_alpha else self.m
        if node.kind not in ("a", "b") or not 1 <= node.index <= limit:
            raise PatternError(f"node {node} out of range (n={self.n}, m={self.m})")

    @property
    def alpha_nodes(self) -> list[Node]:
        return [alpha(i) for i in range(1, self.n + 1)]

    @property
    def beta_nodes(self) -> list[Node]:
        return [beta(j) for j in range(1, self.m + 1)]

    @property
    def nodes(self) -> list[Node]:
        return self.alpha_nodes + self.beta_nodes

    @cached_property
    def successors(self) -> dict[Node, list[Node]]:
        out = {v: [] for v in self.nodes}
        for u, v in sorted(self.edges):
            out[u].append(v)
        return out

    @cached_property
    def predecessors(self) -> dict[Node, list[Node]]:
        inn = {v: [] for v in self.nodes}
        for u, v in sorted(self.edges):
            inn[v].append(u)
        return inn

    def has_edge(self, u: Node, v: Node) -> bool:
        return (u, v) in self.edges

    def has_self_loop(self, i: int) -> bool:
        return (alpha(i), alpha(i)) in self.edges

    def without_edges(self, *edges) -> "SparsityPattern":
        drop = {(parse_node(u) if isinstance(u, str) else u,
                 parse_node(v) if isinstance(v, str) else v) for u, v in edges}
        return SparsityPattern(self.n, self.m, self.edges - drop)

    def with_edges(self, *edges) -> "SparsityPattern":
        add = {(parse_node(u) if isinstance(u, str) else u,
                parse_node(v) if isinstance(v, str) else v) for u, v in edges}
        return SparsityPattern(self.n, self.m, self.edges | add)

    def sorted_edges(self) -> list[tuple[Node, Node]]:
        return sorted(self.edges)

    def __repr__(self) -> str:
        edges = ", ".join(f"{u}->{v}" for u, v in self.sorted_edges())
        return f"SparsityPattern(n={self.n}, m={self.m}, edges=[{edges}])"


# -- parsing / serialization -------------------------------------------------

def _parse_json(text: str) -> SparsityPattern:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PatternError(f"malformed JSON at line {exc.lineno} col {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise PatternError("pattern JSON must be an object")
    for key in ("alpha", "beta", "edges"):
        if key not in data:
            raise PatternError(f"missing key {key!r}")
    n, m = data["alpha"], data["beta"]
    if not (isinstance(n, int) and isinstance(m, int)):
        raise PatternError("'alpha' and 'beta' must be integers")
    pattern_edges = []
    for k, edge in enumerate(data["edges"]):
        if not (isinstance(edge, list) and len(edge) == 2 and all(isinstance(x, str) for x in edge)):
            raise PatternError(f"edges[{k}]: expected [tail, head] names, got {edge!r}")
        try:
            u, v = parse_node(edge[0]), parse_node(edge[1])
        except PatternError as exc:
            raise PatternError(f"edges[{k}]: {exc}") from None
        pattern_edges.append((u, v))
    return _validated(n, m, pattern_edges, lambda k: f"edges[{k}]")


_DOT_HEADER = re.compile(r"^\s*(strict\s+)?digraph\b[^{]*\{", re.S)
_DOT_ATTRS = re.compile(r"\[[^\]]*\]")
_DOT_COMMENT = re.compile(r"//[^\n]*|/\*.*?\*/|^\s*#[^\n]*", re.S | re.M)


def _parse_dot(text: str) -> SparsityPattern:
    # blank out comments but keep their newlines so line numbers stay right
    text = _DOT_COMMENT.sub(lambda mo: "\n" * mo.group().count("\n"), text)
    header = _DOT_HEADER.match(text)
    if not header:
        raise PatternError("DOT input must start with 'digraph {'")
    body_start = header.end()
    body_end = text.rfind("}")
    if body_end < body_start:
        raise PatternError("DOT input missing closing '}'")
    body = text[body_start:body_end]
    first_line = text.count("\n", 0, body_start) + 1

    nodes: list[tuple[Node, int]] = []
    pattern_edges: list[tuple[Node, Node]] = []
    lines: list[int] = []
    for raw_line_no, raw in enumerate(body.split("\n")):
        line_no = first_line + raw_line_no
        line = _DOT_ATTRS.sub("", raw)
        for stmt in line.split(";"):
            stmt = stmt.strip()
            if not stmt or "=" in stmt:
                continue  # graph attributes
            parts = [p.strip().strip('"') for p in stmt.split("->")]
            if parts[0] in ("node", "edge", "graph"):
                continue
            try:
                chain = [parse_node(p) for p in parts]
            except PatternError as exc:
                raise PatternError(f"line {line_no}: {exc}") from None
            nodes.extend((c, line_no) for c in chain)
            for u, v in zip(chain, chain[1:]):
                pattern_edges.append((u, v))
                lines.append(line_no)
    n = max((v.index for v, _ in nodes if v.is_alpha), default=0)
    m = max((v.index for v, _ in nodes if v.is_beta), default=0)
    return _validated(n, m, pattern_edges, lambda k: f"line {lines[k]}")


def _validated(n, m, pattern_edges, where) -> SparsityPattern:
    if n < 1 or m < 1:
        raise PatternError(f"need at least one α-node and one β-node (n={n}, m={m})")
    seen = set()
    for k, (u, v) in enumerate(pattern_edges):
        if v.is_beta:
            raise PatternError(f"{where(k)}: incoming edge to β-node {u} -> {v}")
        for node in (u, v):
            limit = n if node.is_alpha else m
            if node.index > limit:
                raise PatternError(f"{where(k)}: node {node} out of range (n={n}, m={m})")
        if (u, v) in seen:
            raise PatternError(f"{where(k)}: duplicate edge {u} -> {v}")
        seen.add((u, v))
    return SparsityPattern(n, m, frozenset(seen))


def parse_pattern(data: bytes | str, format: str = "json") -> SparsityPattern:
    """Parse a pattern from JSON (canonical) or a small DOT subset.

    JSON: ``{"alpha": n, "beta": m, "edges": [["b1", "a1"], ...]}``.
    DOT: ``digraph { b1 -> a1; a1 -> a1; }``; attributes are ignored and
    ``n``/``m`` are the largest indices mentioned.
    """
    text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    fmt = format.lower()
    if fmt == "json":
        return _parse_json(text)
    if fmt == "dot":
        return _parse_dot(text)
    raise PatternError(f"unknown pattern format {format!r}")


def load_pattern(path) -> SparsityPattern:
    """Read a pattern file; ``.dot``/``.gv`` are DOT, everything else JSON."""
    path = str(path)
    fmt = "dot" if path.endswith((".dot", ".gv")) else "json"
    with open(path, "rb") as fh:
        return parse_pattern(fh.read(), fmt)


def to_json(g: SparsityPattern) -> str:
    edges = [[str(u), str(v)] for u, v in g.sorted_edges()]
    return json.dumps({"alpha": g.n, "beta": g.m, "edges": edges})


def to_dot(g: SparsityPattern) -> str:
    lines = ["digraph {"]
    # declare the largest nodes so isolated ones survive the round trip
    lines.append(f"  a{g.n}; b{g.m};")
    lines += [f"  {u} -> {v};" for u, v in g.sorted_edges()]
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- graph queries -----------------------------------------------------------

def in_neighbor_set(g: SparsityPattern, subset: Iterable[Node]) -> set[Node]:
    """All ``v`` with an edge ``v -> w`` for some ``w`` in ``subset``."""
    result = set()
    for w in subset:
        w = Node(*w)
        g._check_node(w)
        result.update(g.predecessors[w])
    return result


def _closure(g: SparsityPattern, start: Iterable[Node]) -> set[Node]:
    seen = set(start)
    queue = deque(seen)
    while queue:
        u = queue.popleft()
        for v in g.successors[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def accessible(g: SparsityPattern) -> tuple[bool, set[Node]]:
    """Whether every alpha-node is reachable from some beta-node.

    Returns ``(ok, unreachable)``; ``unreachable`` is empty when ``ok``.
    """
    reached = _closure(g, g.beta_nodes)
    unreachable = {v for v in g.alpha_nodes if v not in reached}
    return not unreachable, unreachable


def walk_reach_closure(g: SparsityPattern, k: int) -> set[Node]:
    """Alpha-nodes reached by some walk from a beta-node of length > ``k``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    frontier = {v for b in g.beta_nodes for v in g.successors[b]}
    seen_frontiers = [frozenset(frontier)]
    for step in range(k):
        frontier = {v for u in frontier for v in g.successors[u]}
        if not frontier:
            return set()
        # the frontier sequence is eventually periodic; jump ahead once it repeats
        key = frozenset(frontier)
        if key in seen_frontiers:
            start = seen_frontiers.index(key)
            period = len(seen_frontiers) - start
            remaining = k - (step + 1)
            frontier = set(seen_frontiers[start + remaining % period])
            break
        seen_frontiers.append(key)
    return _closure(g, frontier)
