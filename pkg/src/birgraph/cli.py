"""Command-line interface: ``birgraph <subcommand> ...``.

Exit status: 0 success (``equiv``: equivalent), 1 negative answer
(``equiv``: inequivalent, ``check``: violations found), 2 malformed input,
3 domain error such as a non-standard graph where a standard one is needed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import canon, oracle
from .graph import (
    GraphError,
    ParseError,
    WeightedGraph,
    is_standard,
    parse_graph,
    segments,
    serialize_graph,
)
from .moves import apply_trace, parse_trace

EXIT_OK, EXIT_NO, EXIT_PARSE, EXIT_DOMAIN = 0, 1, 2, 3


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read(source: str) -> str:
    if source == "-":
        return sys.stdin.read()
    try:
        return Path(source).read_text()
    except OSError as exc:
        raise _Fail(EXIT_PARSE, f"{source}: {exc.strerror}") from None


def _parse(text: str, origin: str) -> WeightedGraph:
    try:
        return parse_graph(text)
    except ParseError as exc:
        raise _Fail(EXIT_PARSE, f"{origin}:{exc.line}:{exc.col}: {exc.message}") from None


def _graphs(args, want: int) -> list[WeightedGraph]:
    paths = getattr(args, "paths", None) or []
    if isinstance(paths, str):
        paths = [paths]
    sources = [(p, _read(p)) for p in paths]
    sources += [("<expr>", e) for e in (args.expr or [])]
    if len(sources) != want:
        raise _Fail(EXIT_PARSE, f"expected {want} graph(s) from paths or --expr, got {len(sources)}")
    return [_parse(text, origin) for origin, text in sources]


def _bounds(args) -> oracle.SearchBounds:
    wr = None
    if getattr(args, "weight_range", None):
        lo, hi = (int(x) for x in args.weight_range.split(":"))
        wr = (lo, hi)
    return oracle.SearchBounds.from_env(
        max_vertices=getattr(args, "max_vertices", None),
        max_depth=getattr(args, "max_depth", None),
        max_states=getattr(args, "max_states", None),
        weight_range=wr,
    )


def _emit(args, text_lines: list[str], payload: dict) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


# -- subcommands -----------------------------------------------------------------


def cmd_canon(args) -> int:
    (g,) = _graphs(args, 1)
    form = canon.canonical_form(g)
    trace = None
    if g.is_tree and not g.is_chain:
        _, trace = canon.normalize_branch_weights(g)
    lines = [form.encoding]
    if args.emit_trace:
        lines.append((trace.to_text() if trace is not None else "# trace primitive 0\n").rstrip("\n"))
    if args.trace_out and trace is not None:
        Path(args.trace_out).write_text(trace.to_text())
    if args.graph_out:
        Path(args.graph_out).write_text(serialize_graph(form.normalized))
    payload = {"encoding": form.encoding, "normalized": serialize_graph(form.normalized)}
    if args.emit_trace:
        payload["trace"] = trace.to_text() if trace is not None else ""
    _emit(args, lines, payload)
    return EXIT_OK


def cmd_equiv(args) -> int:
    g1, g2 = _graphs(args, 2)
    same = canon.equivalent(g1, g2)
    lines = ["equivalent" if same else "inequivalent"]
    payload: dict = {"equivalent": same}
    if args.oracle:
        res = oracle.oracle_equivalent(g1, g2, _bounds(args))
        lines.append(f"oracle {res.verdict.value} ({res.reason})")
        payload["oracle"] = {"verdict": res.verdict.value, "reason": res.reason}
    _emit(args, lines, payload)
    return EXIT_OK if same else EXIT_NO


def cmd_gamma0(args) -> int:
    (g,) = _graphs(args, 1)
    dec = canon.gamma0(g)
    lines, comps = [], []
    for i, c in enumerate(dec.components, start=1):
        lines.append(
            f"component {i}: branch={','.join(map(str, c.branch)) or '-'} "
            f"case={c.case} sum={c.weight_sum} vertices={','.join(map(str, sorted(c.vertices)))}"
        )
        comps.append({"branch": list(c.branch), "case": c.case, "sum": c.weight_sum, "vertices": sorted(c.vertices)})
    _emit(args, lines, {"components": comps})
    return EXIT_OK


def cmd_segments(args) -> int:
    (g,) = _graphs(args, 1)
    lines, segs = [], []
    for s in segments(g):
        att = ",".join(map(str, s.attachments)) or "-"
        lines.append(
            f"{s.kind} vertices={','.join(map(str, s.vertices))} weights={','.join(map(str, s.weights))} "
            f"attach={att} zeros={s.zero_block} standard={'yes' if s.is_standard else 'no'}"
        )
        segs.append(
            {
                "kind": s.kind,
                "vertices": list(s.vertices),
                "weights": list(s.weights),
                "attachments": list(s.attachments),
                "zero_block": s.zero_block,
                "standard": s.is_standard,
            }
        )
    _emit(args, lines, {"segments": segs})
    return EXIT_OK


def cmd_apply(args) -> int:
    (g,) = _graphs(args, 1)
    try:
        trace = parse_trace(_read(args.trace))
    except ParseError as exc:
        raise _Fail(EXIT_PARSE, f"{args.trace}:{exc.line}:{exc.col}: {exc.message}") from None
    out = apply_trace(g, trace, check_digests=not args.ignore_digests)
    sys.stdout.write(serialize_graph(out))
    return EXIT_OK


def cmd_standardize(args) -> int:
    (g,) = _graphs(args, 1)
    bounds = _bounds(args) if _bounds_given(args) else oracle.SearchBounds(max_depth=40, max_states=200_000)
    out, trace = oracle.standardize_chain(g, bounds)
    sys.stdout.write(serialize_graph(out))
    if args.emit_trace:
        sys.stdout.write(trace.to_text())
    if args.trace_out:
        Path(args.trace_out).write_text(trace.to_text())
    return EXIT_OK


def _bounds_given(args) -> bool:
    return any(getattr(args, k, None) for k in ("max_vertices", "max_depth", "max_states", "weight_range")) or any(
        k.startswith("BIRGRAPH_") for k in os.environ
    )


def cmd_explore(args) -> int:
    (g,) = _graphs(args, 1)
    res = oracle.explore(g, _bounds(args))
    graphs = res.graphs
    std = sorted(k for k, h in graphs.items() if is_standard(h))
    lines = [f"states={len(res)} complete={'yes' if res.complete else 'no'} depth={res.depth} standard={len(std)}"]
    if args.list:
        lines += sorted(graphs)
    _emit(args, lines, {"states": len(res), "complete": res.complete, "depth": res.depth, "standard": std})
    return EXIT_OK


def cmd_check(args) -> int:
    bounds = _bounds(args) if _bounds_given(args) else oracle.SearchBounds(max_vertices=10)
    report = oracle.check_invariants(args.seed, args.trials, bounds, max_trace=args.max_trace)
    if args.report:
        Path(args.report).write_text(json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n")
    if args.json:
        print(json.dumps(report.to_json(), indent=2, sort_keys=True))
    else:
        sys.stdout.write(report.to_text())
    return EXIT_OK if report.ok else EXIT_NO


def to_dot(g: WeightedGraph, name: str = "G") -> str:
    """DOT rendering with ``id:weight`` vertex labels."""
    lines = [f"graph {name} {{"]
    lines += [f'  {v} [label="{v}:{g.weight(v)}"];' for v in g.vertices]
    lines += [f"  {u} -- {v};" for u, v in sorted(g.edges)]
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_dot(args) -> int:
    (g,) = _graphs(args, 1)
    sys.stdout.write(to_dot(g))
    return EXIT_OK


# -- parser ------------------------------------------------------------------------


def _add_inputs(p, n: str = "?") -> None:
    p.add_argument("paths", nargs=n, default=[], metavar="GRAPH", help=".wg file, or - for stdin")
    p.add_argument("--expr", action="append", metavar="TEXT", help='inline graph, e.g. "chain 0 0 -2"')


def _add_format(p) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--json", action="store_true", help="machine-readable output")
    g.add_argument("--text", action="store_true", help="line-oriented output (default)")


def _add_bounds(p) -> None:
    p.add_argument("--max-vertices", type=int)
    p.add_argument("--max-depth", type=int)
    p.add_argument("--max-states", type=int)
    p.add_argument("--weight-range", metavar="LO:HI")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="birgraph", description="Birational calculus of integer-weighted graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("canon", help="print the canonical encoding")
    _add_inputs(p)
    _add_format(p)
    p.add_argument("--emit-trace", action="store_true", help="also print the normalization trace")
    p.add_argument("--trace-out", metavar="PATH")
    p.add_argument("--graph-out", metavar="PATH", help="write the normalized graph")
    p.set_defaults(func=cmd_canon)

    p = sub.add_parser("equiv", help="decide equivalence of two standard graphs")
    _add_inputs(p, "*")
    _add_format(p)
    _add_bounds(p)
    p.add_argument("--oracle", action="store_true", help="cross-check with the search oracle")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("gamma0", help="show the weight-exchange components")
    _add_inputs(p)
    _add_format(p)
    p.set_defaults(func=cmd_gamma0)

    p = sub.add_parser("segments", help="list linear segments")
    _add_inputs(p)
    _add_format(p)
    p.set_defaults(func=cmd_segments)

    p = sub.add_parser("apply", help="replay a trace file")
    _add_inputs(p)
    p.add_argument("--trace", required=True, metavar="PATH")
    p.add_argument("--ignore-digests", action="store_true")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("standardize", help="bring a linear chain to standard form")
    _add_inputs(p)
    _add_bounds(p)
    p.add_argument("--emit-trace", action="store_true")
    p.add_argument("--trace-out", metavar="PATH")
    p.set_defaults(func=cmd_standardize)

    p = sub.add_parser("explore", help="bounded breadth-first closure under moves")
    _add_inputs(p)
    _add_format(p)
    _add_bounds(p)
    p.add_argument("--list", action="store_true", help="list structural digests")
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("check", help="run the invariant fuzzer")
    _add_format(p)
    _add_bounds(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--max-trace", type=int, default=30)
    p.add_argument("--report", metavar="PATH", help="write the JSON report here")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("dot", help="DOT rendering with id:weight labels")
    _add_inputs(p)
    p.set_defaults(func=cmd_dot)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _Fail as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (GraphError, oracle.SearchExhausted, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
