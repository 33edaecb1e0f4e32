"""Blowups, blowdowns, elementary transformations, reversion, and traces.

Moves are small frozen dataclasses.  ``apply`` rewrites a graph, ``resolve``
fills in the bookkeeping fields (fresh vertex ids, former neighbours) that
make ``inverse`` independent of the graph, and ``to_text`` renders the trace
line format.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .graph import GraphError, WeightedGraph, find_segment, serialize_graph

__all__ = [
    "MoveError",
    "TraceError",
    "Move",
    "BlowUpEdge",
    "BlowUpAtVertex",
    "BlowDown",
    "InnerElementary",
    "OuterElementary",
    "ReverseSegment",
    "Trace",
    "blow_up_edge",
    "blow_up_at_vertex",
    "blow_down",
    "inner_elementary",
    "outer_elementary",
    "reverse_segment",
    "apply_trace",
    "invert_trace",
    "record_trace",
    "expand_trace",
    "parse_trace",
    "graph_digest",
]


class MoveError(GraphError):
    """A move's precondition does not hold on the graph it is applied to."""


class TraceError(MoveError):
    """Replaying a trace failed; ``index`` is the 1-based failing step."""

    def __init__(self, index: int, cause: Exception):
        super().__init__(f"step {index}: {cause}")
        self.index = index
        self.cause = cause


def _require_vertex(g: WeightedGraph, v: int) -> None:
    if v not in g:
        raise MoveError(f"no vertex {v}")


def _rewire(g: WeightedGraph, weights: dict, drop=(), add=(), remove_vertex=None, new_vertex=None):
    adj = {v: set(a) for v, a in g._adj.items()}
    for u, v in drop:
        adj[u].discard(v)
        adj[v].discard(u)
    if remove_vertex is not None:
        for y in adj.pop(remove_vertex):
            adj[y].discard(remove_vertex)
    if new_vertex is not None:
        adj[new_vertex] = set()
    for u, v in add:
        adj[u].add(v)
        adj[v].add(u)
    return WeightedGraph._trusted(weights, {v: frozenset(a) for v, a in adj.items()})


# -- primitive rewrites ------------------------------------------------------


def blow_up_edge(g: WeightedGraph, u: int, v: int, new: int | None = None) -> WeightedGraph:
    """Insert a (-1)-vertex on edge {u, v}; both endpoints lose 1."""
    if not g.has_edge(u, v):
        raise MoveError(f"no edge ({u}, {v})")
    x = g.fresh_id() if new is None else new
    if x in g:
        raise MoveError(f"vertex id {x} already in use")
    w = dict(g._weights)
    w[u] -= 1
    w[v] -= 1
    w[x] = -1
    return _rewire(g, w, drop=[(u, v)], add=[(u, x), (x, v)], new_vertex=x)


def blow_up_at_vertex(g: WeightedGraph, v: int, new: int | None = None) -> WeightedGraph:
    """Attach a (-1)-pendant to ``v``; ``v`` loses 1."""
    _require_vertex(g, v)
    if g.is_circular:
        raise MoveError("a pendant on a cycle leaves the supported topologies")
    x = g.fresh_id() if new is None else new
    if x in g:
        raise MoveError(f"vertex id {x} already in use")
    w = dict(g._weights)
    w[v] -= 1
    w[x] = -1
    return _rewire(g, w, add=[(v, x)], new_vertex=x)


def blow_down(g: WeightedGraph, x: int) -> WeightedGraph:
    """Contract a (-1)-vertex of degree <= 2; neighbours gain 1 and get joined."""
    _require_vertex(g, x)
    if g.weight(x) != -1:
        raise MoveError(f"vertex {x} has weight {g.weight(x)}, not -1")
    nb = sorted(g.neighbors(x))
    if len(nb) > 2:
        raise MoveError(f"vertex {x} has degree {len(nb)} > 2")
    if len(g) == 1:
        raise MoveError("blowing down the last vertex would empty the graph")
    if len(nb) == 2 and g.has_edge(*nb):
        raise MoveError(f"neighbours {nb[0]} and {nb[1]} of {x} are already adjacent")
    w = dict(g._weights)
    del w[x]
    for y in nb:
        w[y] += 1
    return _rewire(g, w, add=[tuple(nb)] if len(nb) == 2 else (), remove_vertex=x)


# -- elementary transformations ----------------------------------------------


def _other_neighbor(g: WeightedGraph, v: int, toward: int) -> int:
    nb = g.neighbors(v)
    if toward not in nb:
        raise MoveError(f"{toward} is not a neighbour of {v}")
    return next(y for y in nb if y != toward)


def inner_elementary(g: WeightedGraph, v: int, toward: int) -> WeightedGraph:
    """Shift one unit of weight across the degree-2 zero vertex ``v``.

    ``toward`` gains 1, the other neighbour loses 1.  Equivalent to blowing
    up the edge from ``v`` to the other neighbour and blowing ``v`` down,
    with the fresh vertex renamed back to ``v``.
    """
    _require_vertex(g, v)
    if g.weight(v) != 0:
        raise MoveError(f"inner elementary needs weight 0 at {v}, found {g.weight(v)}")
    if g.degree(v) != 2:
        raise MoveError(f"inner elementary needs degree 2 at {v}, found {g.degree(v)}")
    other = _other_neighbor(g, v, toward)
    return g.with_weights({toward: g.weight(toward) + 1, other: g.weight(other) - 1})


def outer_elementary(g: WeightedGraph, v: int, sign: int) -> WeightedGraph:
    """Change the neighbour of the zero end-vertex ``v`` by ``sign``."""
    if sign not in (1, -1):
        raise MoveError(f"sign must be +1 or -1, got {sign}")
    _require_vertex(g, v)
    if g.weight(v) != 0:
        raise MoveError(f"outer elementary needs weight 0 at {v}, found {g.weight(v)}")
    if g.degree(v) != 1:
        raise MoveError(f"outer elementary needs degree 1 at {v}, found {g.degree(v)}")
    (n,) = g.neighbors(v)
    return g.with_weights({n: g.weight(n) + sign})


def reverse_segment(g: WeightedGraph, vertices: Iterable[int]) -> WeightedGraph:
    """Move the zero block of a standard segment to its opposite end.

    Along the segment's path the weights ``[0]*2k + W`` become ``W + [0]*2k``,
    i.e. read from the new zero end the segment is ``[[0_2k, W reversed]]``.
    Everything outside the segment, branching weights included, is untouched.
    """
    if g.is_circular:
        raise MoveError("reversion applies to segments of a tree")
    try:
        seg = find_segment(g, vertices)
    except GraphError as exc:
        raise MoveError(str(exc)) from None
    if not seg.is_standard:
        raise MoveError(f"segment {list(seg.vertices)} is not standard: {list(seg.weights)}")
    z = seg.zero_block
    new = seg.tail + (0,) * z
    return g.with_weights(dict(zip(seg.vertices, new)))


# -- move values -------------------------------------------------------------


class Move:
    """Base class; subclasses are frozen dataclasses."""

    primitive = True
    macro = False

    def apply(self, g: WeightedGraph) -> WeightedGraph:
        raise NotImplementedError

    def resolve(self, g: WeightedGraph) -> "Move":
        return self

    def inverse(self) -> "Move":
        raise NotImplementedError

    def to_text(self) -> str:
        raise NotImplementedError

    def renamed(self, mapping: dict) -> "Move":
        raise NotImplementedError

    def __str__(self) -> str:
        return self.to_text()


def _unresolved(move: Move) -> MoveError:
    return MoveError(f"{move.to_text()!r} must be resolved against its source graph before inverting")


def _r(mapping, x):
    return mapping.get(x, x) if x is not None else None


@dataclass(frozen=True)
class BlowUpEdge(Move):
    u: int
    v: int
    new: int | None = None

    def apply(self, g):
        return blow_up_edge(g, self.u, self.v, self.new)

    def resolve(self, g):
        return self if self.new is not None else replace(self, new=g.fresh_id())

    def inverse(self):
        if self.new is None:
            raise _unresolved(self)
        return BlowDown(self.new, tuple(sorted((self.u, self.v))))

    def to_text(self):
        s = f"blowup-edge {self.u} {self.v}"
        return s if self.new is None else f"{s} new={self.new}"

    def renamed(self, m):
        return BlowUpEdge(_r(m, self.u), _r(m, self.v), _r(m, self.new))


@dataclass(frozen=True)
class BlowUpAtVertex(Move):
    v: int
    new: int | None = None

    def apply(self, g):
        return blow_up_at_vertex(g, self.v, self.new)

    def resolve(self, g):
        return self if self.new is not None else replace(self, new=g.fresh_id())

    def inverse(self):
        if self.new is None:
            raise _unresolved(self)
        return BlowDown(self.new, (self.v,))

    def to_text(self):
        s = f"blowup-vertex {self.v}"
        return s if self.new is None else f"{s} new={self.new}"

    def renamed(self, m):
        return BlowUpAtVertex(_r(m, self.v), _r(m, self.new))


@dataclass(frozen=True)
class BlowDown(Move):
    x: int
    neighbors: tuple[int, ...] | None = None

    def apply(self, g):
        return blow_down(g, self.x)

    def resolve(self, g):
        if self.neighbors is not None or self.x not in g:
            return self
        return replace(self, neighbors=tuple(sorted(g.neighbors(self.x))))

    def inverse(self):
        if self.neighbors is None:
            raise _unresolved(self)
        if len(self.neighbors) == 2:
            return BlowUpEdge(*self.neighbors, new=self.x)
        return BlowUpAtVertex(self.neighbors[0], new=self.x)

    def to_text(self):
        s = f"blowdown {self.x}"
        if self.neighbors is None:
            return s
        return f"{s} nbrs={','.join(map(str, self.neighbors))}"

    def renamed(self, m):
        nb = None if self.neighbors is None else tuple(_r(m, y) for y in self.neighbors)
        return BlowDown(_r(m, self.x), nb)


@dataclass(frozen=True)
class InnerElementary(Move):
    v: int
    toward: int
    away: int | None = None

    primitive = False

    def apply(self, g):
        return inner_elementary(g, self.v, self.toward)

    def resolve(self, g):
        if self.away is not None or self.v not in g or self.toward not in g.neighbors(self.v):
            return self
        return replace(self, away=_other_neighbor(g, self.v, self.toward))

    def inverse(self):
        if self.away is None:
            raise _unresolved(self)
        return InnerElementary(self.v, self.away, self.toward)

    def expand(self, g: WeightedGraph) -> tuple[Move, ...]:
        """Primitive pair; the fresh vertex takes over the role of ``v``."""
        other = _other_neighbor(g, self.v, self.toward)
        x = g.fresh_id()
        return (BlowUpEdge(self.v, other, x), BlowDown(self.v, tuple(sorted((x, self.toward)))))

    def to_text(self):
        s = f"inner {self.v} -> {self.toward}"
        return s if self.away is None else f"{s} away={self.away}"

    def renamed(self, m):
        return InnerElementary(_r(m, self.v), _r(m, self.toward), _r(m, self.away))


@dataclass(frozen=True)
class OuterElementary(Move):
    v: int
    sign: int

    primitive = False

    def apply(self, g):
        return outer_elementary(g, self.v, self.sign)

    def inverse(self):
        return OuterElementary(self.v, -self.sign)

    def expand(self, g: WeightedGraph) -> tuple[Move, ...]:
        """Primitive pair; the fresh vertex becomes the new zero end-vertex."""
        (n,) = g.neighbors(self.v)
        x = g.fresh_id()
        if self.sign > 0:
            return (BlowUpAtVertex(self.v, x), BlowDown(self.v, tuple(sorted((n, x)))))
        return (BlowUpEdge(self.v, n, x), BlowDown(self.v, (x,)))

    def to_text(self):
        return f"outer {self.v} {self.sign:+d}"

    def renamed(self, m):
        return OuterElementary(_r(m, self.v), self.sign)


@dataclass(frozen=True)
class ReverseSegment(Move):
    vertices: tuple[int, ...]

    primitive = False
    macro = True

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))

    def apply(self, g):
        return reverse_segment(g, self.vertices)

    def inverse(self):
        # Reversion is an involution.
        return self

    def to_text(self):
        return "reverse " + ",".join(map(str, self.vertices))

    def renamed(self, m):
        return ReverseSegment(tuple(_r(m, v) for v in self.vertices))


# -- traces ------------------------------------------------------------------


def graph_digest(g: WeightedGraph) -> str:
    """Short hash of the labelled graph (ids included)."""
    return hashlib.sha1(serialize_graph(g).encode()).hexdigest()[:12]


@dataclass(frozen=True)
class Trace:
    """A replayable move sequence, optionally with per-step digests."""

    moves: tuple[Move, ...] = ()
    digests: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "moves", tuple(self.moves))
        if self.digests is not None:
            object.__setattr__(self, "digests", tuple(self.digests))
            if len(self.digests) != len(self.moves):
                raise ValueError("one digest per move expected")

    def __len__(self) -> int:
        return len(self.moves)

    def __iter__(self):
        return iter(self.moves)

    def __add__(self, other: "Trace") -> "Trace":
        if self.digests is not None and other.digests is not None:
            return Trace(self.moves + other.moves, self.digests + other.digests)
        return Trace(self.moves + other.moves)

    @property
    def granularity(self) -> str:
        """``primitive``, ``elementary`` or ``macro`` (contains a reversion)."""
        if any(m.macro for m in self.moves):
            return "macro"
        if all(m.primitive for m in self.moves):
            return "primitive"
        return "elementary"

    def to_text(self) -> str:
        lines = [f"# trace {self.granularity} {len(self.moves)}"]
        for i, m in enumerate(self.moves):
            line = m.to_text()
            if self.digests is not None:
                line += f" digest={self.digests[i]}"
            lines.append(line)
        return "\n".join(lines) + "\n"


def apply_trace(g: WeightedGraph, trace: Trace | Sequence[Move], check_digests: bool = True) -> WeightedGraph:
    """Replay moves left to right; a failing step raises :class:`TraceError`."""
    moves = trace.moves if isinstance(trace, Trace) else tuple(trace)
    digests = trace.digests if isinstance(trace, Trace) and check_digests else None
    for i, m in enumerate(moves, start=1):
        try:
            g = m.apply(g)
        except GraphError as exc:
            raise TraceError(i, exc) from exc
        if digests is not None and graph_digest(g) != digests[i - 1]:
            raise TraceError(i, MoveError("intermediate graph does not match the recorded digest"))
    return g


def record_trace(g: WeightedGraph, moves: Iterable[Move], digests: bool = True) -> tuple[Trace, WeightedGraph]:
    """Apply ``moves`` to ``g``, resolving each one; return the trace and result."""
    out, ds = [], []
    for i, m in enumerate(moves, start=1):
        r = m.resolve(g)
        try:
            g = r.apply(g)
        except GraphError as exc:
            raise TraceError(i, exc) from exc
        out.append(r)
        ds.append(graph_digest(g))
    return Trace(out, ds if digests else None), g


def invert_trace(trace: Trace, source: WeightedGraph | None = None) -> Trace:
    """Reverse the order and invert each step.

    Unresolved steps (missing fresh ids or former neighbours) need the
    ``source`` graph the trace starts from.
    """
    moves = trace.moves
    if source is not None:
        moves = record_trace(source, moves, digests=False)[0].moves
    inv = []
    for i, m in enumerate(reversed(moves)):
        try:
            inv.append(m.inverse())
        except MoveError as exc:
            raise TraceError(len(moves) - i, exc) from exc
    return Trace(inv)


def expand_trace(g: WeightedGraph, trace: Trace) -> tuple[Trace, dict[int, int]]:
    """Rewrite elementary steps as blowup/blowdown pairs.

    Returns the primitive trace and the renaming from the original ids to the
    ids in the primitive result; the two endpoints agree after renaming.
    Reversions have no primitive expansion and are rejected.
    """
    rename: dict[int, int] = {}
    out: list[Move] = []
    for i, m in enumerate(trace.moves, start=1):
        if m.macro:
            raise TraceError(i, MoveError("reversion has no primitive expansion"))
        m = m.renamed(rename)
        try:
            if m.primitive:
                steps = (m.resolve(g),)
            else:
                steps = m.expand(g)
                rename[_inv_lookup(rename, m.v)] = steps[0].new
            for s in steps:
                g = s.apply(g)
                out.append(s)
        except GraphError as exc:
            raise TraceError(i, exc) from exc
    return Trace(out), rename


def _inv_lookup(rename: dict[int, int], current: int) -> int:
    for k, v in rename.items():
        if v == current:
            return k
    return current


# -- trace text format -------------------------------------------------------


def _ints(tok: str) -> tuple[int, ...]:
    return tuple(int(x) for x in tok.split(",") if x)


def parse_trace(text: str) -> Trace:
    """Inverse of :meth:`Trace.to_text`; ``#`` starts a comment."""
    from .graph import ParseError

    moves: list[Move] = []
    digests: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        toks = body.split()
        opts = dict(t.split("=", 1) for t in toks if "=" in t)
        args = [t for t in toks if "=" not in t]
        head = args[0]
        try:
            if head == "blowup-edge":
                m: Move = BlowUpEdge(int(args[1]), int(args[2]), int(opts["new"]) if "new" in opts else None)
            elif head == "blowup-vertex":
                m = BlowUpAtVertex(int(args[1]), int(opts["new"]) if "new" in opts else None)
            elif head == "blowdown":
                m = BlowDown(int(args[1]), _ints(opts["nbrs"]) if "nbrs" in opts else None)
            elif head == "inner":
                if len(args) != 4 or args[2] != "->":
                    raise ValueError("expected 'inner <v> -> <toward>'")
                m = InnerElementary(int(args[1]), int(args[3]), int(opts["away"]) if "away" in opts else None)
            elif head == "outer":
                m = OuterElementary(int(args[1]), int(args[2]))
            elif head == "reverse":
                m = ReverseSegment(_ints(args[1]))
            else:
                raise ValueError(f"unknown move {head!r}")
        except (IndexError, ValueError, KeyError) as exc:
            raise ParseError(str(exc) or "malformed move", lineno, 1) from None
        moves.append(m)
        if "digest" in opts:
            digests.append(opts["digest"])
    if digests and len(digests) != len(moves):
        raise ParseError("either every step or no step carries a digest", 1, 1)
    return Trace(moves, digests or None)
