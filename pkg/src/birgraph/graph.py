"""Weighted graphs, the line-oriented text format, and segment decomposition."""

from __future__ import annotations

import re
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping

__all__ = [
    "GraphError",
    "ParseError",
    "WeightedGraph",
    "Segment",
    "parse_graph",
    "serialize_graph",
    "branch_points",
    "end_vertices",
    "segments",
    "standard_split",
    "is_standard_word",
    "is_standard",
    "graph_minus_segment",
    "intersection_determinant",
    "characteristic_polynomial",
    "intersection_inertia",
    "find_segment",
    "zero_block_first",
]


class GraphError(ValueError):
    """Raised when a graph violates the model (topology, missing vertex, ...)."""


class ParseError(ValueError):
    """Malformed graph text. ``line`` and ``col`` are 1-based."""

    def __init__(self, message: str, line: int, col: int = 1):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


def _edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class WeightedGraph:
    """Connected simple graph with an integer weight on every vertex.

    Only trees and single cycles (every vertex of degree 2) are accepted.
    Instances are immutable; every rewrite returns a new graph.
    """

    __slots__ = ("_weights", "_adj", "_edges", "_hash", "_circular")

    def __init__(self, weights: Mapping[int, int], edges: Iterable[tuple[int, int]] = ()):
        w = {int(v): int(x) for v, x in weights.items()}
        if not w:
            raise GraphError("the empty graph is not representable")
        adj: dict[int, set[int]] = {v: set() for v in w}
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            for x in (u, v):
                if x not in w:
                    raise GraphError(f"edge ({u}, {v}) references undeclared vertex {x}")
            if v in adj[u]:
                raise GraphError(f"duplicate edge ({u}, {v})")
            adj[u].add(v)
            adj[v].add(u)
        self._init(w, {v: frozenset(n) for v, n in adj.items()})
        self._check_topology()

    def _init(self, weights: dict[int, int], adj: dict[int, frozenset[int]]) -> None:
        self._weights = weights
        self._adj = adj
        self._edges = None
        self._hash = None
        self._circular = None

    @classmethod
    def _trusted(cls, weights: dict[int, int], adj: dict[int, frozenset[int]]) -> "WeightedGraph":
        # Callers guarantee the topology invariants; used on hot rewrite paths.
        g = cls.__new__(cls)
        g._init(weights, adj)
        return g

    def _check_topology(self) -> None:
        n = len(self._weights)
        start = next(iter(self._weights))
        seen = {start}
        stack = [start]
        while stack:
            for y in self._adj[stack.pop()]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != n:
            raise GraphError("graph is disconnected")
        m = sum(len(a) for a in self._adj.values()) // 2
        if m == n - 1:
            return
        if m == n and all(len(a) == 2 for a in self._adj.values()):
            return
        raise GraphError(
            "forbidden topology: only trees and simple cycles are supported "
            f"(|V|={n}, |E|={m})"
        )

    # -- constructors -------------------------------------------------------

    @classmethod
    def chain(cls, weights: Iterable[int]) -> "WeightedGraph":
        ws = [int(x) for x in weights]
        return cls({i + 1: x for i, x in enumerate(ws)}, [(i, i + 1) for i in range(1, len(ws))])

    @classmethod
    def cycle(cls, weights: Iterable[int]) -> "WeightedGraph":
        ws = [int(x) for x in weights]
        if len(ws) < 3:
            raise GraphError("a simple cycle needs at least 3 vertices")
        n = len(ws)
        return cls({i + 1: x for i, x in enumerate(ws)}, [(i + 1, (i + 1) % n + 1) for i in range(n)])

    # -- accessors ----------------------------------------------------------

    @property
    def weights(self) -> Mapping[int, int]:
        return MappingProxyType(self._weights)

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted(self._weights))

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        if self._edges is None:
            self._edges = frozenset(_edge(u, v) for u, nb in self._adj.items() for v in nb)
        return self._edges

    def weight(self, v: int) -> int:
        try:
            return self._weights[v]
        except KeyError:
            raise GraphError(f"no vertex {v}") from None

    def neighbors(self, v: int) -> frozenset[int]:
        try:
            return self._adj[v]
        except KeyError:
            raise GraphError(f"no vertex {v}") from None

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def has_vertex(self, v: int) -> bool:
        return v in self._weights

    def has_edge(self, u: int, v: int) -> bool:
        return u in self._adj and v in self._adj[u]

    def __len__(self) -> int:
        return len(self._weights)

    def __contains__(self, v: object) -> bool:
        return v in self._weights

    @property
    def is_circular(self) -> bool:
        if self._circular is None:
            n = len(self._weights)
            self._circular = n >= 3 and sum(len(a) for a in self._adj.values()) == 2 * n
        return self._circular

    @property
    def is_tree(self) -> bool:
        return not self.is_circular

    @property
    def is_chain(self) -> bool:
        return self.is_tree and all(len(a) <= 2 for a in self._adj.values())

    def fresh_id(self) -> int:
        return max(self._weights) + 1

    def chain_order(self) -> tuple[int, ...]:
        """Vertices of a chain from the lower-id end to the other end."""
        if not self.is_chain:
            raise GraphError("graph is not a linear chain")
        if len(self) == 1:
            return self.vertices
        ends = sorted(v for v, a in self._adj.items() if len(a) == 1)
        return _walk(self._adj, ends[0])

    def cycle_order(self) -> tuple[int, ...]:
        """Vertices around a cycle, starting at the lowest id toward its lower neighbour."""
        if not self.is_circular:
            raise GraphError("graph is not circular")
        start = min(self._weights)
        order = [start, min(self._adj[start])]
        while len(order) < len(self):
            nxt = next(y for y in self._adj[order[-1]] if y != order[-2])
            order.append(nxt)
        return tuple(order)

    # -- derived graphs -----------------------------------------------------

    def with_weights(self, updates: Mapping[int, int]) -> "WeightedGraph":
        w = dict(self._weights)
        for v, x in updates.items():
            if v not in w:
                raise GraphError(f"no vertex {v}")
            w[v] = int(x)
        return WeightedGraph._trusted(w, self._adj)

    def relabel(self, mapping: Mapping[int, int]) -> "WeightedGraph":
        """Rename vertices; ``mapping`` must be injective on the vertex set."""
        if len({mapping[v] for v in self._weights}) != len(self._weights):
            raise GraphError("relabelling is not injective")
        w = {mapping[v]: x for v, x in self._weights.items()}
        adj = {mapping[v]: frozenset(mapping[y] for y in a) for v, a in self._adj.items()}
        return WeightedGraph._trusted(w, adj)

    def compact(self) -> "WeightedGraph":
        """Renumber vertices 1..n preserving their relative order."""
        return self.relabel({v: i + 1 for i, v in enumerate(self.vertices)})

    def induced(self, keep: Iterable[int]) -> "WeightedGraph":
        keep = set(keep)
        w = {v: self._weights[v] for v in keep}
        adj = {v: frozenset(y for y in self._adj[v] if y in keep) for v in keep}
        g = WeightedGraph._trusted(w, adj)
        g._check_topology()
        return g

    # -- dunder -------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return self._weights == other._weights and self._adj == other._adj

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((frozenset(self._weights.items()), self.edges))
        return self._hash

    def __repr__(self) -> str:
        if self.is_chain and self.vertices == tuple(range(1, len(self) + 1)) and (
            len(self) == 1 or self.chain_order() == self.vertices
        ):
            return "WeightedGraph.chain([" + ", ".join(str(self._weights[v]) for v in self.vertices) + "])"
        return f"WeightedGraph({dict(sorted(self._weights.items()))}, {sorted(self.edges)})"

    def __str__(self) -> str:
        return serialize_graph(self)


def _walk(adj: Mapping[int, frozenset[int]], start: int, allowed=None) -> tuple[int, ...]:
    order = [start]
    prev = None
    cur = start
    while True:
        nxt = [y for y in adj[cur] if y != prev and (allowed is None or y in allowed)]
        if not nxt:
            return tuple(order)
        prev, cur = cur, nxt[0]
        order.append(cur)


# -- text format -------------------------------------------------------------

_TOKEN = re.compile(r"\S+")


def _int_token(tok: str, line: int, col: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected integer {what}, got {tok!r}", line, col) from None


def parse_graph(text: str) -> WeightedGraph:
    """Parse the line format (``v id w`` / ``e a b`` or a ``chain``/``cycle`` shorthand).

    ``;`` and ``/`` act as line breaks so graphs fit on a command line.
    """
    weights: dict[int, int] = {}
    edges: list[tuple[int, int]] = []
    seen_edges: set[tuple[int, int]] = set()
    shorthand: WeightedGraph | None = None
    last_line = 1
    for lineno, raw in enumerate(re.split(r"[\n;/]", text), start=1):
        body = raw.split("#", 1)[0]
        toks = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(body)]
        if not toks:
            continue
        last_line = lineno
        head, hcol = toks[0]
        args = toks[1:]
        if shorthand is not None or (head in ("chain", "cycle") and (weights or edges)):
            raise ParseError("a chain/cycle shorthand must be the only statement", lineno, hcol)
        if head == "v":
            if len(args) != 2:
                raise ParseError("expected 'v <id> <weight>'", lineno, hcol)
            vid = _int_token(args[0][0], lineno, args[0][1], "vertex id")
            wt = _int_token(args[1][0], lineno, args[1][1], "weight")
            if vid in weights:
                raise ParseError(f"duplicate vertex id {vid}", lineno, args[0][1])
            weights[vid] = wt
        elif head == "e":
            if len(args) != 2:
                raise ParseError("expected 'e <id> <id>'", lineno, hcol)
            ends = []
            for tok, col in args:
                x = _int_token(tok, lineno, col, "vertex id")
                if x not in weights:
                    raise ParseError(f"edge references undeclared vertex {x}", lineno, col)
                ends.append(x)
            u, v = ends
            if u == v:
                raise ParseError(f"self-loop at vertex {u}", lineno, hcol)
            if _edge(u, v) in seen_edges:
                raise ParseError(f"duplicate edge ({u}, {v})", lineno, hcol)
            seen_edges.add(_edge(u, v))
            edges.append((u, v))
        elif head in ("chain", "cycle"):
            if not args:
                raise ParseError(f"'{head}' needs at least one weight", lineno, hcol)
            ws = [_int_token(t, lineno, c, "weight") for t, c in args]
            try:
                shorthand = WeightedGraph.chain(ws) if head == "chain" else WeightedGraph.cycle(ws)
            except GraphError as exc:
                raise ParseError(str(exc), lineno, hcol) from None
        else:
            raise ParseError(f"unknown statement {head!r}", lineno, hcol)
    if shorthand is not None:
        return shorthand
    if not weights:
        raise ParseError("no vertices declared", last_line, 1)
    try:
        return WeightedGraph(weights, edges)
    except GraphError as exc:
        raise ParseError(str(exc), last_line, 1) from None


def serialize_graph(g: WeightedGraph) -> str:
    lines = [f"v {v} {g.weight(v)}" for v in g.vertices]
    lines += [f"e {u} {v}" for u, v in sorted(g.edges)]
    return "\n".join(lines) + "\n"


# -- structure ---------------------------------------------------------------


def branch_points(g: WeightedGraph) -> frozenset[int]:
    """Vertices of degree at least 3."""
    return frozenset(v for v in g.vertices if g.degree(v) >= 3)


def end_vertices(g: WeightedGraph) -> frozenset[int]:
    return frozenset(v for v in g.vertices if g.degree(v) == 1)


def standard_split(word: tuple[int, ...] | list[int]) -> tuple[int, tuple[int, ...], bool] | None:
    """Match a linear weight word against ``[0]*2k + tail`` (tail entries <= -2).

    Returns ``(zero_count, tail, zeros_first)`` for the orientation that
    matches, or ``None`` if neither orientation does.  An all-zero word of any
    length matches with an empty tail.  ``tail`` is given in the order it
    appears in ``word``.
    """
    word = tuple(word)
    if all(x == 0 for x in word):
        return len(word), (), True
    lead = 0
    while word[lead] == 0:
        lead += 1
    trail = 0
    while word[-1 - trail] == 0:
        trail += 1
    if lead and trail:
        return None
    zeros = lead or trail
    tail = word[lead: len(word) - trail]
    if zeros % 2 or any(x > -2 for x in tail):
        return None
    return zeros, tail, trail == 0


def is_standard_word(word) -> bool:
    return standard_split(word) is not None


@dataclass(frozen=True)
class Segment:
    """A maximal linear piece of a tree with branching vertices removed.

    ``vertices`` runs from the end touching ``start_attachment`` to the end
    touching ``end_attachment`` (either may be ``None``).  For a standard
    segment the orientation puts the zero block first.
    """

    vertices: tuple[int, ...]
    weights: tuple[int, ...]
    start_attachment: int | None
    end_attachment: int | None

    @property
    def attachments(self) -> tuple[int, ...]:
        return tuple(a for a in (self.start_attachment, self.end_attachment) if a is not None)

    @property
    def kind(self) -> str:
        return ("whole", "end", "inner")[len(self.attachments)]

    @property
    def zero_block(self) -> int:
        n = 0
        for x in self.weights:
            if x:
                break
            n += 1
        return n

    @property
    def tail(self) -> tuple[int, ...]:
        return self.weights[self.zero_block:]

    @property
    def is_standard(self) -> bool:
        return is_standard_word(self.weights)

    @property
    def is_odd_zero(self) -> bool:
        return len(self.weights) % 2 == 1 and not any(self.weights)

    def reversed(self) -> "Segment":
        return Segment(self.vertices[::-1], self.weights[::-1], self.end_attachment, self.start_attachment)

    def read_from(self, attachment: int) -> "Segment":
        """This segment oriented so that it starts next to ``attachment``."""
        if self.start_attachment == attachment:
            return self
        if self.end_attachment == attachment:
            return self.reversed()
        raise GraphError(f"segment is not attached to {attachment}")

    def __len__(self) -> int:
        return len(self.vertices)


def segments(g: WeightedGraph) -> list[Segment]:
    """Connected components of ``g`` minus its branching vertices, as paths.

    Segments come sorted by their smallest vertex id.
    """
    if g.is_circular:
        raise GraphError("segments() expects a tree; a cycle is a single circular segment")
    branch = branch_points(g)
    rest = set(g.vertices) - branch
    out = []
    while rest:
        seed = min(rest)
        # Walk to one end of the path component, then back across it.
        end = _walk(g._adj, seed, rest)[-1]
        path = _walk(g._adj, end, rest)
        rest.difference_update(path)
        first = [b for b in g.neighbors(path[0]) if b in branch]
        last = [b for b in g.neighbors(path[-1]) if b in branch]
        if len(path) == 1:
            att = sorted(first)
            start_att = att[0] if att else None
            end_att = att[1] if len(att) > 1 else None
        else:
            start_att = first[0] if first else None
            end_att = last[0] if last else None
        seg = Segment(path, tuple(g.weight(v) for v in path), start_att, end_att)
        if _needs_flip(seg):
            seg = seg.reversed()
        out.append(seg)
    out.sort(key=lambda s: min(s.vertices))
    return out


def _needs_flip(seg: Segment) -> bool:
    split = standard_split(seg.weights)
    if split is not None and split[0] and split[1]:
        return not split[2]
    # Default orientation: start at an attachment, else at the lower-id end.
    if seg.start_attachment is None and seg.end_attachment is not None:
        return True
    if not seg.attachments:
        return seg.vertices[-1] < seg.vertices[0]
    if seg.end_attachment is not None and seg.start_attachment is not None:
        return len(seg) > 1 and seg.end_attachment < seg.start_attachment
    return False


def zero_block_first(word) -> list[int]:
    """Rotate a cyclic word so it starts with a zero that follows a non-zero entry."""
    word = list(word)
    n = len(word)
    i = next((j for j in range(n) if word[j] and not word[(j + 1) % n]), n - 1)
    return word[i + 1:] + word[: i + 1]


def is_standard(g: WeightedGraph) -> bool:
    """True iff every segment (or the cyclic weight word) has standard shape.

    Branching-vertex weights are unconstrained.
    """
    if g.is_circular:
        word = [g.weight(v) for v in g.cycle_order()]
        if not any(word):
            return True
        split = standard_split(zero_block_first(word))
        return split is not None and split[2]
    return all(s.is_standard for s in segments(g))


def find_segment(g: WeightedGraph, vertices: Iterable[int]) -> Segment:
    key = frozenset(vertices)
    for s in segments(g):
        if frozenset(s.vertices) == key:
            return s
    raise GraphError(f"{sorted(key)} is not a segment of the graph")


def graph_minus_segment(g: WeightedGraph, seg: Segment) -> tuple[WeightedGraph, ...]:
    """Delete the segment's vertices; return the remaining components.

    Components are ordered by their smallest vertex id.
    """
    find_segment(g, seg.vertices)
    rest = set(g.vertices) - set(seg.vertices)
    comps = []
    while rest:
        seed = min(rest)
        comp = {seed}
        stack = [seed]
        while stack:
            for y in g.neighbors(stack.pop()):
                if y in rest and y not in comp:
                    comp.add(y)
                    stack.append(y)
        rest -= comp
        comps.append(g.induced(comp))
    return tuple(comps)


def intersection_determinant(g: WeightedGraph) -> int:
    """Determinant of the matrix with weights on the diagonal and 1 per edge.

    Exact integer arithmetic (fraction-free Bareiss elimination).
    """
    verts = g.vertices
    idx = {v: i for i, v in enumerate(verts)}
    n = len(verts)
    m = [[0] * n for _ in range(n)]
    for v in verts:
        m[idx[v]][idx[v]] = g.weight(v)
    for u, v in g.edges:
        m[idx[u]][idx[v]] = m[idx[v]][idx[u]] = 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * pivot - m[i][k] * m[k][j]) // prev
        prev = pivot
    return sign * m[n - 1][n - 1]


def _intersection_matrix(g: WeightedGraph) -> list[list[int]]:
    idx = {v: i for i, v in enumerate(g.vertices)}
    m = [[0] * len(idx) for _ in idx]
    for v, i in idx.items():
        m[i][i] = g.weight(v)
    for u, v in g.edges:
        m[idx[u]][idx[v]] = m[idx[v]][idx[u]] = 1
    return m


def characteristic_polynomial(g: WeightedGraph) -> tuple[int, ...]:
    """Coefficients of det(xI - M), highest degree first (Faddeev-LeVerrier, exact)."""
    a = _intersection_matrix(g)
    n = len(a)
    coeffs = [1]
    mk = [[0] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{k-1} I ; c_k = -tr(A M_k) / k
        prev = [[sum(a[i][t] * mk[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        for i in range(n):
            prev[i][i] += coeffs[-1]
        mk = prev
        tr = sum(sum(a[i][t] * mk[t][i] for t in range(n)) for i in range(n))
        coeffs.append(-tr // k)
    return tuple(coeffs)


def intersection_inertia(g: WeightedGraph) -> tuple[int, int, int]:
    """(positive, zero, negative) eigenvalue counts of the intersection matrix.

    The matrix is symmetric, so its characteristic polynomial is real-rooted
    and Descartes' sign rule counts positive roots exactly.
    """
    p = list(characteristic_polynomial(g))
    zero = 0
    while p and p[-1] == 0:
        p.pop()
        zero += 1

    def changes(cs):
        signs = [c > 0 for c in cs if c]
        return sum(1 for x, y in zip(signs, signs[1:]) if x != y)

    pos = changes(p)
    deg = len(p) - 1
    neg = changes([c * (-1) ** (deg - i) for i, c in enumerate(p)])
    return pos, zero, neg
