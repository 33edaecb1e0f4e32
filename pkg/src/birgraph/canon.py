"""Branching-weight normalization and canonical forms of standard graphs.

Weight can only travel between branching vertices through all-zero segments
of odd length.  Grouping branching vertices along those segments gives the
components handled here: a component that reaches an end-vertex of the graph
can absorb any weight, every other component only redistributes a fixed sum.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import total_ordering

from .graph import (
    GraphError,
    Segment,
    WeightedGraph,
    branch_points,
    is_standard,
    segments,
    standard_split,
    zero_block_first,
)
from .moves import InnerElementary, Move, OuterElementary, Trace, record_trace

__all__ = [
    "ENCODING_VERSION",
    "NotStandardError",
    "Gamma0Component",
    "Gamma0Decomposition",
    "CanonicalForm",
    "gamma0",
    "shift_across_segment",
    "normalize_branch_weights",
    "canonical_form",
    "equivalent",
]

ENCODING_VERSION = "bgc1"

END = "end"
INTERIOR = "interior"


class NotStandardError(GraphError):
    """The operation needs a standard graph (of the right kind)."""


def _require_standard_tree(g: WeightedGraph) -> None:
    if g.is_circular:
        raise NotStandardError("expected a non-circular graph")
    if not is_standard(g):
        raise NotStandardError("graph is not standard: some segment is not [[0_2k, w...]] or [[0_2k+1]]")


@dataclass(frozen=True)
class Gamma0Component:
    vertices: frozenset[int]
    branch: tuple[int, ...]
    case: str
    weight_sum: int
    segments: tuple[Segment, ...] = field(repr=False, default=())

    @property
    def has_end_vertex(self) -> bool:
        return self.case == END


@dataclass(frozen=True)
class Gamma0Decomposition:
    gamma0_vertices: frozenset[int]
    components: tuple[Gamma0Component, ...]

    def component_of(self, v: int) -> Gamma0Component:
        for c in self.components:
            if v in c.vertices:
                return c
        raise KeyError(v)


def gamma0(g: WeightedGraph) -> Gamma0Decomposition:
    """Branching vertices plus odd all-zero segments, split into components."""
    _require_standard_tree(g)
    branch = branch_points(g)
    odd = [s for s in segments(g) if s.is_odd_zero]
    parent = {v: v for v in branch}
    for s in odd:
        for v in s.vertices:
            parent[v] = v

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for s in odd:
        for v in s.vertices[1:]:
            union(s.vertices[0], v)
        for b in s.attachments:
            union(s.vertices[0], b)
    groups: dict[int, set[int]] = {}
    for v in parent:
        groups.setdefault(find(v), set()).add(v)
    comps = []
    for verts in sorted(groups.values(), key=min):
        bs = tuple(sorted(v for v in verts if v in branch))
        case = END if any(g.degree(v) == 1 for v in verts) else INTERIOR
        segs = tuple(s for s in odd if s.vertices[0] in verts)
        comps.append(Gamma0Component(frozenset(verts), bs, case, sum(g.weight(b) for b in bs), segs))
    return Gamma0Decomposition(frozenset(parent), tuple(comps))


# -- weight transport -----------------------------------------------------------


def _unit_moves(seg: Segment, gainer: int, sign: int) -> list[Move]:
    """Moves changing ``gainer`` by ``sign`` through the odd zero segment.

    Across an inner segment the opposite attachment changes by ``-sign``; the
    zeros of the segment are restored after every unit.
    """
    z = seg.read_from(gainer).vertices
    m = len(z)
    inner = seg.kind == "inner"
    moves: list[Move] = []
    if sign > 0:
        prev = (gainer,) + z
        moves += [InnerElementary(z[i], prev[i]) for i in range(0, m if inner else m - 1, 2)]
        if not inner:
            moves.append(OuterElementary(z[-1], 1))
    else:
        if inner:
            far = seg.read_from(gainer).end_attachment
            return _unit_moves(seg, far, 1)
        moves += [InnerElementary(z[i], z[i + 1]) for i in range(0, m - 1, 2)]
        moves.append(OuterElementary(z[-1], -1))
    return moves


def shift_across_segment(
    g: WeightedGraph, seg: Segment, s: int, toward: int | None = None
) -> tuple[WeightedGraph, Trace]:
    """Add ``s`` to the weight of ``toward`` using an odd all-zero segment.

    For an inner segment the other attached branching vertex loses ``s``;
    for an end segment only ``toward`` changes.  The segment itself is left
    as it was.  Returns the new graph and the elementary moves used.
    """
    if not seg.is_odd_zero:
        raise NotStandardError(f"segment {list(seg.vertices)} is not an odd all-zero segment")
    if any(g.weight(v) != 0 for v in seg.vertices):
        raise GraphError("segment weights do not match the graph")
    if not seg.attachments:
        raise GraphError("a whole-line segment has no branching vertex to shift weight to")
    if toward is None:
        if seg.kind == "inner":
            raise GraphError("an inner segment needs the receiving attachment")
        toward = seg.attachments[0]
    if toward not in seg.attachments:
        raise GraphError(f"{toward} is not attached to the segment")
    if s == 0:
        return g, Trace((), ())
    unit = _unit_moves(seg, toward, 1 if s > 0 else -1)
    trace, h = record_trace(g, unit * abs(s))
    return h, trace


# -- skeleton naming ---------------------------------------------------------------


def _segment_label(seg: Segment, side: int | None) -> str:
    """Zero count and non-zero part read from ``side``; blind to the zero block's end."""
    if side is not None:
        seg = seg.read_from(side)
    zeros, tail, _ = standard_split(seg.weights)
    return f"{zeros}:{','.join(map(str, tail))}"


class _Skeleton:
    """Branching vertices joined by direct edges or inner segments, with end segments as decorations."""

    def __init__(self, g: WeightedGraph):
        self.branch = sorted(branch_points(g))
        self.links: dict[int, list[tuple[int, Segment | None]]] = {b: [] for b in self.branch}
        self.ends: dict[int, list[str]] = {b: [] for b in self.branch}
        for s in segments(g):
            if s.kind == "inner":
                a, b = s.attachments
                self.links[a].append((b, s))
                self.links[b].append((a, s))
            else:
                (a,) = s.attachments
                self.ends[a].append(_segment_label(s, a))
        bset = set(self.branch)
        for b in self.branch:
            self.links[b] += [(y, None) for y in g.neighbors(b) if y in bset]
            self.ends[b].sort()

    def rooted_name(self, root: int, labels: dict[int, str]) -> str:
        names: dict[int, str] = {}
        order = []
        stack = [(root, None)]
        while stack:
            v, p = stack.pop()
            order.append((v, p))
            stack.extend((y, v) for y, _ in self.links[v] if y != p)
        for v, p in reversed(order):
            kids = sorted(
                ("-" if s is None else _segment_label(s, v)) + names[y]
                for y, s in self.links[v]
                if y != p
            )
            names[v] = "[" + labels[v] + "|" + ";".join(self.ends[v]) + "|" + "".join(kids) + "]"
        return names[root]

    def name(self, labels: dict[int, str]) -> str:
        return min(self.rooted_name(b, labels) for b in self.branch)


def _choose_roots(g: WeightedGraph, dec: Gamma0Decomposition, sk: _Skeleton) -> dict[Gamma0Component, int]:
    """Canonical root per component (interior: carries the sum; end: gathers before annihilation)."""
    labels: dict[int, str] = {}
    for c in dec.components:
        for b in c.branch:
            labels[b] = "e" if c.case == END else f"u{c.weight_sum}"
    roots: dict[Gamma0Component, int] = {}
    pending = [c for c in dec.components if c.case == INTERIOR and c.branch]
    # Fix one component at a time; ties between equal names are automorphic.
    while pending:
        # Equal names are automorphic; prefer the larger id so the sum lands last.
        _, nb = min((sk.rooted_name(b, labels), -b) for c in pending for b in c.branch)
        b = -nb
        c = dec.component_of(b)
        roots[c] = b
        for x in c.branch:
            labels[x] = str(c.weight_sum) if x == b else "0"
        pending = [p for p in pending if p is not c]
    for c in dec.components:
        if c.case == END and c.branch:
            dist = _end_distances(g, c)
            roots[c] = min(c.branch, key=lambda b: (dist[b], sk.rooted_name(b, labels), b))
    return roots


def _component_bfs(g: WeightedGraph, comp: Gamma0Component, sources) -> dict[int, int]:
    dist = {s: 0 for s in sources}
    q = deque(sources)
    while q:
        v = q.popleft()
        for y in g.neighbors(v):
            if y in comp.vertices and y not in dist:
                dist[y] = dist[v] + 1
                q.append(y)
    return dist


def _end_distances(g: WeightedGraph, comp: Gamma0Component) -> dict[int, int]:
    ends = [v for v in comp.vertices if g.degree(v) == 1]
    return _component_bfs(g, comp, ends)


def normalize_branch_weights(g: WeightedGraph) -> tuple[WeightedGraph, Trace]:
    """Gather branching weights per component; zero them all where an end-vertex is reachable.

    Interior components keep their weight sum on one canonically chosen root.
    Weights flow along a BFS tree of the component, farthest vertices first.
    """
    _require_standard_tree(g)
    if not branch_points(g):
        return g, Trace((), ())
    dec = gamma0(g)
    sk = _Skeleton(g)
    roots = _choose_roots(g, dec, sk)
    trace = Trace((), ())
    for comp in dec.components:
        if not comp.branch:
            continue
        root = roots[comp]
        links: dict[int, list[tuple[int, Segment]]] = {b: [] for b in comp.branch}
        for s in comp.segments:
            if s.kind == "inner":
                a, b = s.attachments
                links[a].append((b, s))
                links[b].append((a, s))
        # BFS over branching vertices; distance counts graph edges.
        dist = {root: 0}
        via: dict[int, tuple[int, Segment]] = {}
        q = deque([root])
        while q:
            v = q.popleft()
            for y, s in sorted(links[v], key=lambda t: (len(t[1]), t[0])):
                if y not in dist:
                    dist[y] = dist[v] + len(s) + 1
                    via[y] = (v, s)
                    q.append(y)
        for v in sorted(via, key=lambda b: (-dist[b], b)):
            p, s = via[v]
            g, t = shift_across_segment(g, s, g.weight(v), toward=p)
            trace = trace + t
        if comp.case == END:
            ends = [s for s in comp.segments if s.kind == "end" and root in s.attachments]
            seg = min(ends, key=lambda s: (len(s), s.vertices))
            g, t = shift_across_segment(g, seg, -g.weight(root), toward=root)
            trace = trace + t
    return g, trace


# -- canonical forms -------------------------------------------------------------------


@total_ordering
@dataclass(frozen=True, eq=False)
class CanonicalForm:
    """Version-prefixed text encoding plus a normalized witness graph."""

    encoding: str
    normalized: WeightedGraph = field(compare=False)

    def __eq__(self, other):
        if not isinstance(other, CanonicalForm):
            return NotImplemented
        return self.encoding == other.encoding

    def __lt__(self, other):
        return self.encoding < other.encoding

    def __hash__(self):
        return hash(self.encoding)

    def __bytes__(self) -> bytes:
        return self.encoding.encode()

    def __str__(self) -> str:
        return self.encoding


def _lexmin_rev(word: tuple[int, ...]) -> tuple[int, ...]:
    return min(word, word[::-1])


def _circular_form(g: WeightedGraph) -> CanonicalForm:
    word = [g.weight(v) for v in g.cycle_order()]
    n = len(word)
    if not any(word):
        return CanonicalForm(f"{ENCODING_VERSION}:C:{n}:", WeightedGraph.cycle(word))
    if not is_standard(g):
        raise NotStandardError("circular graph is not standard")
    zeros = word.count(0)
    rot = zero_block_first(word)
    tail = tuple(rot[zeros:])
    k = len(tail)
    best = min(
        tuple(w[(r + j) % k] for j in range(k)) for w in (tail, tail[::-1]) for r in range(k)
    )
    enc = f"{ENCODING_VERSION}:C:{zeros}:{','.join(map(str, best))}"
    return CanonicalForm(enc, WeightedGraph.cycle([0] * zeros + list(best)))


def canonical_form(g: WeightedGraph) -> CanonicalForm:
    """Encoding shared exactly by equivalent standard graphs.

    Trees: branching weights are normalized, each segment is labelled by its
    zero count and non-zero part read away from the branching vertex, and the
    skeleton tree gets the minimum rooted name over all roots.  Chains and
    cycles get a zero count plus a dihedral minimum of the non-zero word.
    """
    if g.is_circular:
        return _circular_form(g)
    _require_standard_tree(g)
    if not branch_points(g):
        zeros, tail, _ = standard_split([g.weight(v) for v in g.chain_order()])
        best = _lexmin_rev(tail)
        enc = f"{ENCODING_VERSION}:L:{zeros}:{','.join(map(str, best))}"
        return CanonicalForm(enc, WeightedGraph.chain([0] * zeros + list(best)))
    h, _ = normalize_branch_weights(g)
    sk = _Skeleton(h)
    labels = {b: str(h.weight(b)) for b in sk.branch}
    return CanonicalForm(f"{ENCODING_VERSION}:T:{sk.name(labels)}", h)


def equivalent(g1: WeightedGraph, g2: WeightedGraph) -> bool:
    """Whether two standard graphs are birationally equivalent."""
    if g1.is_circular != g2.is_circular:
        for g in (g1, g2):
            if not is_standard(g):
                raise NotStandardError("graph is not standard")
        return False
    return canonical_form(g1) == canonical_form(g2)
