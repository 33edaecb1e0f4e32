"""Acceptance criteria 1-8, one test each.

Every test prints a single ``[PASS]``/``[FAIL]`` line with its measurements,
whether or not pytest captures output.  Run just this file with

    pytest tests/test_acceptance.py -v

or directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import collections
import itertools
import random
import sys
import time

import networkx as nx
import pytest

from birgraph.canon import canonical_form, equivalent, normalize_branch_weights
from birgraph.fixtures import case1_star, paper_tree
from birgraph.graph import WeightedGraph, intersection_determinant, is_standard
from birgraph.moves import apply_trace, reverse_segment
from birgraph.oracle import SearchBounds, Verdict, check_invariants, oracle_equivalent, standardize_chain, structural_digest


def report(number: int, title: str, ok: bool, elapsed: float, limit: float, detail: str) -> None:
    status = "PASS" if ok and elapsed < limit else "FAIL"
    line = f"[{status}] criterion {number}: {title} ({elapsed:.2f}s, limit {limit:g}s) {detail}"
    capman = _CAPTURE.get("capsys")
    if capman is not None:
        with capman.disabled():
            print("\n" + line)
    else:
        print(line)


_CAPTURE: dict = {}


@pytest.fixture(autouse=True)
def _uncaptured(capsys):
    _CAPTURE["capsys"] = capsys
    yield
    _CAPTURE.pop("capsys", None)


def word(g):
    return [g.weight(v) for v in g.chain_order()]


# -- 1 -----------------------------------------------------------------------------


def test_criterion_1_paper_example():
    t = time.perf_counter()
    g, branch = paper_tree([2, -3, 5])
    h, trace = normalize_branch_weights(g)
    weights = tuple(h.weight(b) for b in branch)
    form = canonical_form(g)
    checks = {
        "weights": weights == (0, 0, 4),
        "replay": apply_trace(g, trace) == h,
        "witness": form.normalized == h,
        "eq 1,1,2": equivalent(g, paper_tree([1, 1, 2])[0]),
        "eq 4,0,0": equivalent(g, paper_tree([4, 0, 0])[0]),
        "neq 0,0,5": not equivalent(g, paper_tree([0, 0, 5])[0]),
    }
    elapsed = time.perf_counter() - t
    ok = all(checks.values())
    report(1, "PaperTree(3; 2,-3,5) normal form and equivalences", ok, elapsed, 1, f"branch weights={weights} {checks}")
    assert ok and elapsed < 1


# -- 2 -----------------------------------------------------------------------------


def test_criterion_2_case1_freedom():
    t = time.perf_counter()
    a, b = case1_star(5), case1_star(-7)
    canon_ok = equivalent(a, b)
    res = oracle_equivalent(a, b)
    elapsed = time.perf_counter() - t
    ok = canon_ok and res.verdict is Verdict.TRUE
    report(2, "case-1 star c=5 vs c=-7", ok, elapsed, 10, f"equivalent={canon_ok} oracle={res.verdict.value} states={res.states}")
    assert ok and elapsed < 10


# -- 3 -----------------------------------------------------------------------------


def standard_chains(max_len: int, tail_weights):
    for n in range(1, max_len + 1):
        for zeros in range(0, max_len - n + 1, 2):
            for tail in itertools.product(tail_weights, repeat=n):
                yield [0] * zeros + list(tail)
    for zeros in range(1, max_len + 1, 2):
        yield [0] * zeros


def test_criterion_3_reversion():
    t = time.perf_counter()
    family = list(standard_chains(7, range(-5, -1)))
    mismatches = 0
    nontrivial = []
    for w in family:
        g = WeightedGraph.chain(w)
        h = reverse_segment(g, g.vertices)
        if canonical_form(g) != canonical_form(h):
            mismatches += 1
        if structural_digest(g) != structural_digest(h):
            nontrivial.append((g, h))
    rng = random.Random(3)
    sample = rng.sample(nontrivial, 60)
    # Moving the zero pair past a weight w takes |w| inner moves, hence the depth.
    bounds = SearchBounds(max_vertices=9, weight_range=(-6, 2), max_depth=40, max_states=200_000)
    verdicts = collections.Counter(oracle_equivalent(g, h, bounds).verdict.value for g, h in sample)
    elapsed = time.perf_counter() - t
    ok = mismatches == 0 and verdicts["true"] >= 50 and verdicts["false"] == 0
    report(
        3,
        "reversion uniqueness on standard chains",
        ok,
        elapsed,
        60,
        f"chains={len(family)} canon mismatches={mismatches} nontrivial={len(nontrivial)} oracle on {len(sample)}: {dict(verdicts)}",
    )
    assert ok and elapsed < 60


# -- 4 -----------------------------------------------------------------------------


def dihedral_class(tail):
    n = len(tail)
    return min(tuple(w[(r + j) % n] for j in range(n)) for w in (tail, tail[::-1]) for r in range(n))


def test_criterion_4_circular():
    t = time.perf_counter()
    variant_failures = 0
    seen: dict[str, tuple] = {}
    collisions = 0
    cycles = 0
    for zeros in (0, 2, 4):
        for n in range(1, 6):
            if zeros + n < 3:
                continue
            for tail in itertools.product(range(-4, -1), repeat=n):
                cycles += 1
                base = canonical_form(WeightedGraph.cycle([0] * zeros + list(tail))).encoding
                variants = [tail[r:] + tail[:r] for r in range(n)] + [tail[::-1]]
                for v in variants:
                    if canonical_form(WeightedGraph.cycle([0] * zeros + list(v))).encoding != base:
                        variant_failures += 1
                key = (zeros, dihedral_class(tail))
                if seen.setdefault(base, key) != key:
                    collisions += 1
    distinct_keys = len(set(seen.values()))
    elapsed = time.perf_counter() - t
    ok = variant_failures == 0 and collisions == 0 and distinct_keys == len(seen)
    report(
        4,
        "circular clause",
        ok,
        elapsed,
        30,
        f"cycles={cycles} rotation/reflection failures={variant_failures} encodings={len(seen)} collisions={collisions}",
    )
    assert ok and elapsed < 30


# -- 5 -----------------------------------------------------------------------------


def test_criterion_5_fuzzing():
    t = time.perf_counter()
    rep = check_invariants(seed=2024, trials=1000, bounds=SearchBounds(max_vertices=10), max_trace=30)
    elapsed = time.perf_counter() - t
    ok = rep.ok and all(rep.checks[p] > 0 for p in rep.checks)
    report(5, "invariant fuzzing, 1000 traces", ok, elapsed, 60, f"checks={dict(rep.checks)} violations={len(rep.violations)}")
    assert ok and elapsed < 60


# -- 6 -----------------------------------------------------------------------------


def standard_tree_family(max_n: int, weights) -> dict[str, WeightedGraph]:
    """All standard trees up to isomorphism; tree shapes come from networkx."""
    fam: dict[str, WeightedGraph] = {}
    for n in range(1, max_n + 1):
        shapes = nx.nonisomorphic_trees(n) if n > 1 else [nx.empty_graph(1)]
        for tree in shapes:
            edges = [(u + 1, v + 1) for u, v in tree.edges()]
            for ws in itertools.product(weights, repeat=n):
                g = WeightedGraph({i + 1: w for i, w in enumerate(ws)}, edges)
                if is_standard(g):
                    fam.setdefault(structural_digest(g), g)
    return fam


def test_criterion_6_oracle_agreement():
    t = time.perf_counter()
    fam = standard_tree_family(8, (-3, -2, 0))
    keys = sorted(fam)
    enc = {k: canonical_form(fam[k]).encoding for k in keys}
    classes = collections.defaultdict(list)
    by_det = collections.defaultdict(list)
    for k in keys:
        classes[enc[k]].append(k)
        by_det[abs(intersection_determinant(fam[k]))].append(k)
    multi = [c for c in sorted(classes) if len(classes[c]) > 1]
    dets = [d for d in sorted(by_det) if len({enc[k] for k in by_det[d]}) > 1]
    rng = random.Random(2024)
    pairs = [tuple(rng.sample(classes[rng.choice(multi)], 2)) for _ in range(200)]
    while len(pairs) < 500:
        a, b = rng.sample(by_det[rng.choice(dets)], 2)
        if enc[a] != enc[b]:
            pairs.append((a, b))
    bounds = SearchBounds(max_vertices=10, max_depth=10, max_states=3000)
    tally = collections.Counter()
    contradictions = []
    for a, b in pairs:
        same = enc[a] == enc[b]
        verdict = oracle_equivalent(fam[a], fam[b], bounds).verdict
        tally[(same, verdict.value)] += 1
        if (verdict is Verdict.TRUE and not same) or (verdict is Verdict.FALSE and same):
            contradictions.append((a, b))
    elapsed = time.perf_counter() - t
    ok = not contradictions
    detail = ", ".join(f"{'same' if s else 'diff'}/{v}={n}" for (s, v), n in sorted(tally.items()))
    report(
        6,
        "oracle agreement on standard trees <= 8 vertices",
        ok,
        elapsed,
        300,
        f"family={len(fam)} classes={len(classes)} pairs={len(pairs)} [{detail}] contradictions={len(contradictions)}",
    )
    assert ok and elapsed < 300


# -- 7 -----------------------------------------------------------------------------


def test_criterion_7_standardize():
    t = time.perf_counter()
    results = {}
    for src, expected in (([2], [0, 0, -2]), ([-1, -1], [0])):
        g = WeightedGraph.chain(src)
        out, trace = standardize_chain(g)
        results[tuple(src)] = (
            word(out) in (expected, expected[::-1])
            and apply_trace(g, trace) == out
            and abs(intersection_determinant(out)) == abs(intersection_determinant(g))
        )
    elapsed = time.perf_counter() - t
    ok = all(results.values())
    report(7, "chain standardization", ok, elapsed, 5, f"{results}")
    assert ok and elapsed < 5


# -- 8 -----------------------------------------------------------------------------


def test_criterion_8_relabeling():
    t = time.perf_counter()
    rng = random.Random(8)
    distinct = {}
    for name, g in (("PaperTree", paper_tree([2, -3, 5])[0]), ("star", case1_star(5))):
        ids = list(g.vertices)
        encodings = {canonical_form(g).encoding}
        for _ in range(100):
            h = g.relabel(dict(zip(ids, rng.sample(range(1, 10_000), len(ids)))))
            encodings.add(canonical_form(h).encoding)
        distinct[name] = len(encodings)
    elapsed = time.perf_counter() - t
    ok = all(n == 1 for n in distinct.values())
    report(8, "relabeling invariance, 100 renumberings each", ok, elapsed, 5, f"distinct encodings={distinct}")
    assert ok and elapsed < 5


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
