"""Brute-force referee: bounded move-space search, invariant fuzzing, chain standardization.

Nothing here consults the canonical form for its verdicts.  States are keyed
by :func:`structural_digest`, an isomorphism-invariant labelling computed
from scratch (tree centre + AHU strings, dihedral minimum for cycles).
"""

from __future__ import annotations

import enum
import heapq
import os
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .graph import WeightedGraph, GraphError, intersection_determinant, intersection_inertia
from .moves import (
    BlowDown,
    BlowUpAtVertex,
    BlowUpEdge,
    InnerElementary,
    Move,
    OuterElementary,
    Trace,
)

__all__ = [
    "SearchBounds",
    "ExploreResult",
    "Verdict",
    "OracleResult",
    "structural_digest",
    "applicable_moves",
    "explore",
    "oracle_equivalent",
    "SearchExhausted",
    "standardize_chain",
    "Violation",
    "InvariantReport",
    "check_invariants",
    "random_tree",
    "random_standard_tree",
]


@dataclass(frozen=True)
class SearchBounds:
    max_vertices: int = 12
    weight_range: tuple[int, int] = (-8, 8)
    max_depth: int = 12
    max_states: int = 2_000_000

    def __post_init__(self):
        lo, hi = self.weight_range
        if self.max_vertices < 1 or self.max_depth < 0 or self.max_states < 1 or lo > hi:
            raise ValueError(f"invalid search bounds: {self}")

    @classmethod
    def from_env(cls, **overrides) -> "SearchBounds":
        """Defaults, overridden by ``BIRGRAPH_MAX_*`` / ``BIRGRAPH_WEIGHT_RANGE``, then kwargs."""
        kw: dict = {}
        for name in ("max_vertices", "max_depth", "max_states"):
            val = os.environ.get(f"BIRGRAPH_{name.upper()}")
            if val:
                kw[name] = int(val)
        wr = os.environ.get("BIRGRAPH_WEIGHT_RANGE")
        if wr:
            lo, hi = (int(x) for x in wr.split(":"))
            kw["weight_range"] = (lo, hi)
        kw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kw)

    def admits(self, g: WeightedGraph) -> bool:
        lo, hi = self.weight_range
        return len(g) <= self.max_vertices and all(lo <= x <= hi for x in g.weights.values())


# -- structural digest ---------------------------------------------------------


def _ahu(g: WeightedGraph, root: int, parent: int | None) -> str:
    # Iterative post-order to stay clear of the recursion limit on long chains.
    names: dict[int, str] = {}
    order = []
    stack = [(root, parent)]
    while stack:
        v, p = stack.pop()
        order.append((v, p))
        for y in g.neighbors(v):
            if y != p:
                stack.append((y, v))
    for v, p in reversed(order):
        kids = sorted(names[y] for y in g.neighbors(v) if y != p)
        names[v] = f"({g.weight(v)}{''.join(kids)})"
    return names[root]


def _tree_centers(adj) -> list[int]:
    deg = {v: len(a) for v, a in adj.items()}
    layer = [v for v, d in deg.items() if d <= 1]
    remaining = len(deg)
    while remaining > 2:
        remaining -= len(layer)
        nxt = []
        for v in layer:
            for y in adj[v]:
                deg[y] -= 1
                if deg[y] == 1:
                    nxt.append(y)
        layer = nxt
    return layer


def _cycle_word(g: WeightedGraph) -> tuple[int, ...]:
    word = [g.weight(v) for v in g.cycle_order()]
    n = len(word)
    return min(tuple(w[(i + j) % n] for j in range(n)) for w in (word, word[::-1]) for i in range(n))


def structural_digest(g: WeightedGraph) -> str:
    """Isomorphism-invariant key of a weighted tree or cycle (stable across runs)."""
    if g.is_circular:
        return "C" + ",".join(map(str, _cycle_word(g)))
    return "T" + min(_ahu(g, c, None) for c in _tree_centers(g._adj))


# Rooted subtree shape (weight, sorted child ids) -> small int; process-local.
_INTERN: dict[tuple, int] = {}


def _state_key(g: WeightedGraph):
    """Fast in-process equivalent of :func:`structural_digest` for visited sets."""
    if g.is_circular:
        return ("C", _cycle_word(g))
    adj, w = g._adj, g._weights
    best = None
    for root in _tree_centers(adj):
        order = [(root, None)]
        i = 0
        while i < len(order):
            v, p = order[i]
            i += 1
            order.extend((y, v) for y in adj[v] if y != p)
        ids: dict[int, int] = {}
        for v, p in reversed(order):
            key = (w[v], tuple(sorted(ids[y] for y in adj[v] if y != p)))
            ids[v] = _INTERN.setdefault(key, len(_INTERN))
        if best is None or ids[root] < best:
            best = ids[root]
    return best


# -- move enumeration ----------------------------------------------------------

PRIMITIVE = "primitive"
ELEMENTARY = "elementary"


def applicable_moves(g: WeightedGraph, kinds: Iterable[str] = (PRIMITIVE, ELEMENTARY)) -> Iterator[Move]:
    """Every resolved move of the requested kinds that applies to ``g``.

    Reversions are deliberately absent: the referee must not assume them.
    """
    kinds = set(kinds)
    fresh = g.fresh_id()
    if PRIMITIVE in kinds:
        for u, v in sorted(g.edges):
            yield BlowUpEdge(u, v, fresh)
        if not g.is_circular:
            for v in g.vertices:
                yield BlowUpAtVertex(v, fresh)
        if len(g) > 1:
            for x in g.vertices:
                if g.weight(x) == -1 and g.degree(x) <= 2:
                    nb = tuple(sorted(g.neighbors(x)))
                    if len(nb) == 2 and g.has_edge(*nb):
                        continue
                    yield BlowDown(x, nb)
    if ELEMENTARY in kinds:
        for v in g.vertices:
            if g.weight(v) != 0:
                continue
            nb = sorted(g.neighbors(v))
            if len(nb) == 2:
                yield InnerElementary(v, nb[0], nb[1])
                yield InnerElementary(v, nb[1], nb[0])
            elif len(nb) == 1:
                yield OuterElementary(v, 1)
                yield OuterElementary(v, -1)


# -- exploration ---------------------------------------------------------------


@dataclass
class _Node:
    graph: WeightedGraph
    parent: object
    move: Move | None
    depth: int


@dataclass
class ExploreResult:
    """Reachable isomorphism classes.

    ``nodes`` uses in-process keys; :attr:`graphs` re-keys the stored
    representatives by :func:`structural_digest`.
    """

    root: object
    nodes: dict[object, _Node]
    complete: bool
    depth: int

    def __contains__(self, g: WeightedGraph) -> bool:
        return _state_key(g) in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def graphs(self) -> dict[str, WeightedGraph]:
        return {structural_digest(n.graph): n.graph for n in self.nodes.values()}

    def trace_to(self, key) -> Trace:
        """Moves leading from the start graph to the stored representative of ``key``."""
        if isinstance(key, WeightedGraph):
            key = _state_key(key)
        moves = []
        node = self.nodes[key]
        while node.parent is not None:
            moves.append(node.move)
            node = self.nodes[node.parent]
        return Trace(tuple(reversed(moves)))


def _successors(g: WeightedGraph, bounds: SearchBounds, kinds) -> Iterator[tuple[Move, WeightedGraph]]:
    for m in applicable_moves(g, kinds):
        try:
            h = m.apply(g)
        except GraphError:
            continue
        if bounds.admits(h):
            yield m, h


def explore(g: WeightedGraph, bounds: SearchBounds = SearchBounds(), kinds=(PRIMITIVE, ELEMENTARY)) -> ExploreResult:
    """Breadth-first closure of ``g`` under the moves, pruned by ``bounds``.

    ``complete`` is False when the state budget ran out before the depth
    limit was exhausted.
    """
    if not bounds.admits(g):
        raise ValueError("start graph lies outside the search bounds")
    root = _state_key(g)
    nodes = {root: _Node(g, None, None, 0)}
    frontier = [root]
    depth = 0
    while frontier and depth < bounds.max_depth:
        nxt = []
        for key in frontier:
            for m, h in _successors(nodes[key].graph, bounds, kinds):
                hk = _state_key(h)
                if hk in nodes:
                    continue
                if len(nodes) >= bounds.max_states:
                    return ExploreResult(root, nodes, False, depth)
                nodes[hk] = _Node(h, key, m, depth + 1)
                nxt.append(hk)
        frontier = nxt
        depth += 1
    return ExploreResult(root, nodes, True, depth)


# -- search-based equivalence ----------------------------------------------------


class Verdict(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    INCONCLUSIVE = "inconclusive"


@dataclass
class OracleResult:
    """Outcome of :func:`oracle_equivalent`.

    On ``TRUE`` the two traces carry each input to isomorphic graphs.
    """

    verdict: Verdict
    reason: str
    witness: tuple[Trace, Trace] | None = None
    states: int = 0

    def __bool__(self) -> bool:
        return self.verdict is Verdict.TRUE


def _bidirectional(g1, g2, bounds: SearchBounds, kinds, budget: int):
    k1, k2 = _state_key(g1), _state_key(g2)
    sides = [
        {"nodes": {k1: _Node(g1, None, None, 0)}, "frontier": [k1], "depth": 0},
        {"nodes": {k2: _Node(g2, None, None, 0)}, "frontier": [k2], "depth": 0},
    ]
    used = 2
    while True:
        # An exhausted side means no connection exists inside the bounds.
        if sides[0]["depth"] + sides[1]["depth"] >= bounds.max_depth or not all(s["frontier"] for s in sides):
            return None, used
        side = min(sides, key=lambda s: len(s["frontier"]))
        other = sides[1] if side is sides[0] else sides[0]
        nxt = []
        for key in side["frontier"]:
            for m, h in _successors(side["nodes"][key].graph, bounds, kinds):
                hk = _state_key(h)
                if hk in side["nodes"]:
                    continue
                side["nodes"][hk] = _Node(h, key, m, side["depth"] + 1)
                used += 1
                if hk in other["nodes"]:
                    a = ExploreResult(k1, sides[0]["nodes"], True, 0).trace_to(hk)
                    b = ExploreResult(k2, sides[1]["nodes"], True, 0).trace_to(hk)
                    return (a, b), used
                if used >= budget:
                    return None, used
                nxt.append(hk)
        side["frontier"] = nxt
        side["depth"] += 1


def oracle_equivalent(g1: WeightedGraph, g2: WeightedGraph, bounds: SearchBounds = SearchBounds()) -> OracleResult:
    """Decide equivalence by search, or refute it by an invariant.

    ``FALSE`` is only returned when the circular/tree type, the absolute
    intersection determinant, or the positive/null inertia of the
    intersection form differ; failing to find a connection within
    ``bounds`` yields ``INCONCLUSIVE``.  The search runs twice: first with
    elementary moves only (cheap, shape preserving), then with every move.
    """
    if structural_digest(g1) == structural_digest(g2):
        return OracleResult(Verdict.TRUE, "isomorphic", (Trace(), Trace()), 1)
    if g1.is_circular != g2.is_circular:
        return OracleResult(Verdict.FALSE, "circular vs tree")
    d1, d2 = abs(intersection_determinant(g1)), abs(intersection_determinant(g2))
    if d1 != d2:
        return OracleResult(Verdict.FALSE, f"|det| {d1} != {d2}")
    # A blowup adds one negative direction to the intersection form and
    # leaves the rest congruent, so positive and null counts are invariant.
    i1, i2 = intersection_inertia(g1)[:2], intersection_inertia(g2)[:2]
    if i1 != i2:
        return OracleResult(Verdict.FALSE, f"inertia (n+, n0) {i1} != {i2}")
    if not (bounds.admits(g1) and bounds.admits(g2)):
        return OracleResult(Verdict.INCONCLUSIVE, "inputs outside search bounds")
    used = 0
    for kinds in ((ELEMENTARY,), (PRIMITIVE, ELEMENTARY)):
        witness, n = _bidirectional(g1, g2, bounds, kinds, bounds.max_states - used)
        used += n
        if witness is not None:
            return OracleResult(Verdict.TRUE, f"connected by search ({'+'.join(kinds)})", witness, used)
        if used >= bounds.max_states:
            break
    return OracleResult(Verdict.INCONCLUSIVE, "no connection within bounds", None, used)


# -- chain standardization ------------------------------------------------------


class SearchExhausted(RuntimeError):
    """No standard form was found inside the search bounds."""


def _is_standard_chain(g: WeightedGraph) -> bool:
    from .graph import is_standard

    return g.is_chain and is_standard(g)


def standardize_chain(
    g: WeightedGraph, bounds: SearchBounds = SearchBounds(max_depth=40, max_states=200_000)
) -> tuple[WeightedGraph, Trace]:
    """Bring a linear chain to standard shape, returning the witness trace.

    Fast path: blow down (-1)-vertices while any exist.  If the result is
    not yet standard, run a best-first search (elementary moves first, then
    all moves) toward standard shape.
    """
    from .moves import record_trace

    if not g.is_chain:
        raise GraphError("standardize_chain expects a linear chain")
    moves: list[Move] = []
    h = g
    while len(h) > 1:
        x = next((v for v in h.chain_order() if h.weight(v) == -1), None)
        if x is None:
            break
        m = BlowDown(x).resolve(h)
        h = m.apply(h)
        moves.append(m)
    if not _is_standard_chain(h):
        for kinds in ((ELEMENTARY,), (PRIMITIVE, ELEMENTARY)):
            found = _search_standard(h, bounds, kinds)
            if found is not None:
                moves.extend(found.moves)
                break
        else:
            raise SearchExhausted(f"no standard chain within {bounds}")
    trace, out = record_trace(g, moves)
    return out, trace


def _badness(g: WeightedGraph) -> int:
    """Rough distance of a chain from standard shape (0 iff standard)."""
    if not g.is_chain:
        return 10 * len(g)
    word = [g.weight(v) for v in g.chain_order()]
    if _is_standard_chain(g):
        return 0
    score = sum(w + 1 for w in word if w > 0) + sum(1 for w in word if w == -1)
    lead = next((i for i, w in enumerate(word) if w), len(word))
    trail = next((i for i, w in enumerate(reversed(word)) if w), len(word))
    run = max(lead, trail)
    score += word.count(0) - run + (run % 2)
    return score + 1


def _search_standard(g: WeightedGraph, bounds: SearchBounds, kinds) -> Trace | None:
    """Best-first search on :func:`_badness`; ties broken by discovery order."""
    if not bounds.admits(g):
        lo, hi = bounds.weight_range
        ws = g.weights.values()
        bounds = SearchBounds(
            max(bounds.max_vertices, len(g) + 4), (min(lo, *ws), max(hi, *ws)), bounds.max_depth, bounds.max_states
        )
    root = _state_key(g)
    nodes = {root: _Node(g, None, None, 0)}
    heap = [(_badness(g), 0, root)]
    tick = 0
    while heap:
        _, _, key = heapq.heappop(heap)
        node = nodes[key]
        if node.depth >= bounds.max_depth:
            continue
        for m, h in _successors(node.graph, bounds, kinds):
            hk = _state_key(h)
            if hk in nodes:
                continue
            nodes[hk] = _Node(h, key, m, node.depth + 1)
            if _is_standard_chain(h):
                return ExploreResult(root, nodes, False, node.depth + 1).trace_to(hk)
            if len(nodes) >= bounds.max_states:
                return None
            tick += 1
            heapq.heappush(heap, (_badness(h), tick, hk))
    return None


# -- invariant fuzzing ---------------------------------------------------------------

REPORT_SCHEMA = "birgraph.invariant-report/1"
PROPERTIES = ("det-invariance", "inverse-roundtrip", "gamma0-sum", "canonical-form")


@dataclass
class Violation:
    property: str
    graph: str
    trace: str
    detail: str

    def as_dict(self) -> dict:
        return {"property": self.property, "graph": self.graph, "trace": self.trace, "detail": self.detail}


@dataclass
class InvariantReport:
    seed: int
    trials: int
    checks: dict[str, int] = field(default_factory=lambda: dict.fromkeys(PROPERTIES, 0))
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_text(self) -> str:
        lines = [f"seed={self.seed} trials={self.trials}"]
        for prop in PROPERTIES:
            bad = sum(v.property == prop for v in self.violations)
            lines.append(f"{'FAIL' if bad else 'ok'} {prop} checks={self.checks[prop]} violations={bad}")
        for v in self.violations[:20]:
            lines.append(f"violation {v.property}: {v.detail}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        """Schema ``birgraph.invariant-report/1``.

        ``{"schema", "seed", "trials", "ok", "checks": {property: int},
        "violations": [{"property", "graph", "trace", "detail"}]}``; graphs
        and traces use the line formats of :mod:`birgraph.graph` and
        :mod:`birgraph.moves`.
        """
        return {
            "schema": REPORT_SCHEMA,
            "seed": self.seed,
            "trials": self.trials,
            "ok": self.ok,
            "checks": dict(self.checks),
            "violations": [v.as_dict() for v in self.violations],
        }


def random_tree(rng, n: int, weights=(-3, 2)) -> WeightedGraph:
    """Uniform labelled tree on 1..n (Pruefer code) with uniform weights."""
    ws = {v: rng.randint(*weights) for v in range(1, n + 1)}
    if n == 1:
        return WeightedGraph(ws)
    if n == 2:
        return WeightedGraph(ws, [(1, 2)])
    code = [rng.randint(1, n) for _ in range(n - 2)]
    deg = {v: 1 for v in ws}
    for v in code:
        deg[v] += 1
    edges = []
    for v in code:
        leaf = min(u for u in ws if deg[u] == 1)
        edges.append((leaf, v))
        deg[leaf] -= 1
        deg[v] -= 1
    u, w = (x for x in ws if deg[x] == 1)
    edges.append((u, w))
    return WeightedGraph(ws, edges)


def random_standard_tree(rng, n: int, tail=(-4, -2), branch=(-4, 4)) -> WeightedGraph:
    """Random tree shape with every segment rewritten into a standard word."""
    from .graph import branch_points, segments

    g = random_tree(rng, n)
    upd = {b: rng.randint(*branch) for b in branch_points(g)}
    for seg in segments(g):
        m = len(seg)
        if m % 2 and rng.random() < 0.5:
            word = [0] * m
        else:
            zeros = 2 * rng.randint(0, m // 2)
            if zeros == m and m % 2 == 0 and rng.random() < 0.5:
                zeros -= 2
            if m % 2 and zeros == m:
                zeros -= 1
            body = [rng.randint(*tail) for _ in range(m - zeros)]
            word = [0] * zeros + body if rng.random() < 0.5 else body + [0] * zeros
        upd.update(zip(seg.vertices, word))
    return g.with_weights(upd)


def _random_cycle(rng, n: int) -> WeightedGraph:
    return WeightedGraph.cycle([rng.randint(-3, 1) for _ in range(n)])


def _reversion_moves(g: WeightedGraph) -> list[Move]:
    from .graph import segments
    from .moves import ReverseSegment

    if g.is_circular:
        return []
    return [ReverseSegment(s.vertices) for s in segments(g) if s.is_standard and s.zero_block and s.tail]


class _Checker:
    def __init__(self, report: InvariantReport):
        self.report = report

    def step(self, g: WeightedGraph, m: Move, start: WeightedGraph, done: list[Move]) -> WeightedGraph:
        from .moves import Trace

        r = self.report
        h = m.apply(g)
        r.checks["det-invariance"] += 1
        d0, d1 = abs(intersection_determinant(g)), abs(intersection_determinant(h))
        if d0 != d1:
            self.fail("det-invariance", start, done + [m], f"{m.to_text()}: |det| {d0} -> {d1}")
        r.checks["inverse-roundtrip"] += 1
        try:
            back = m.inverse().apply(h)
        except GraphError as exc:
            back = exc
        if back != g:
            self.fail("inverse-roundtrip", start, done + [m], f"{m.to_text()} then {m.inverse().to_text()}: {back!r}")
        done.append(m)
        return h

    def fail(self, prop, start, moves, detail):
        from .graph import serialize_graph
        from .moves import Trace

        self.report.violations.append(Violation(prop, serialize_graph(start), Trace(moves).to_text(), detail))


def _sums(g: WeightedGraph) -> dict:
    from .canon import gamma0

    return {frozenset(c.branch): c.weight_sum for c in gamma0(g).components if c.case == "interior" and c.branch}


def check_invariants(seed: int, trials: int, bounds: SearchBounds = SearchBounds(max_vertices=10), max_trace: int = 30) -> InvariantReport:
    """Fuzz moves and the canonical form on random graphs and traces.

    Odd trials walk random graphs (trees and cycles) with random primitive,
    elementary and reversion moves, checking |det| and inverse round trips
    at every step.  Even trials start from a random standard tree and only
    take steps that land on standard graphs (unit weight transports,
    reversions, standardness-preserving elementary moves); at every standard
    stop the interior Gamma_0 sums and the canonical form must match the
    start.
    """
    import random

    from .canon import canonical_form, shift_across_segment
    from .graph import is_standard, segments, serialize_graph
    from .moves import Trace

    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = random.Random(seed)
    report = InvariantReport(seed, trials)
    chk = _Checker(report)
    nmax = max(1, bounds.max_vertices)
    for t in range(trials):
        length = rng.randint(1, max_trace)
        done: list[Move] = []
        if t % 2:
            n = rng.randint(1, nmax)
            g = _random_cycle(rng, n) if n >= 3 and rng.random() < 0.2 else random_tree(rng, n)
            start = g
            while len(done) < length:
                cands = [m for m in applicable_moves(g) if not (isinstance(m, (BlowUpEdge, BlowUpAtVertex)) and len(g) >= nmax)]
                cands += _reversion_moves(g)
                if not cands:
                    break
                m = rng.choice(cands)
                try:
                    g = chk.step(g, m, start, done)
                except GraphError:
                    continue
            continue
        g = random_standard_tree(rng, rng.randint(1, nmax))
        start = g
        ref_form = canonical_form(g)
        ref_sums = _sums(g)
        while len(done) < length:
            options = []
            for s in segments(g):
                if s.is_odd_zero and s.attachments:
                    options.append(("shift", s))
            options += [("move", m) for m in _reversion_moves(g)]
            for m in applicable_moves(g, (ELEMENTARY,)):
                try:
                    if is_standard(m.apply(g)):
                        options.append(("move", m))
                except GraphError:
                    pass
            if not options:
                break
            kind, obj = rng.choice(options)
            if kind == "shift":
                toward = rng.choice(obj.attachments)
                _, unit = shift_across_segment(g, obj, rng.choice((1, -1)), toward)
                steps = list(unit.moves)
            else:
                steps = [obj]
            for m in steps:
                g = chk.step(g, m, start, done)
            report.checks["gamma0-sum"] += 1
            sums = _sums(g)
            if sums != ref_sums:
                chk.fail("gamma0-sum", start, list(done), f"{ref_sums} -> {sums}")
            report.checks["canonical-form"] += 1
            form = canonical_form(g)
            if form != ref_form:
                chk.fail("canonical-form", start, list(done), f"{ref_form} -> {form} at {serialize_graph(g)!r}")
    return report
