import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from birgraph.canon import (
    END,
    INTERIOR,
    NotStandardError,
    canonical_form,
    equivalent,
    gamma0,
    normalize_branch_weights,
    shift_across_segment,
)
from birgraph.fixtures import case1_star, paper_tree, star
from birgraph.graph import WeightedGraph, branch_points, intersection_determinant, segments
from birgraph.moves import apply_trace, reverse_segment
from birgraph.oracle import random_standard_tree


class TestGamma0:
    def test_paper_tree(self, tree3):
        g, branch = tree3
        dec = gamma0(g)
        (comp,) = dec.components
        assert set(comp.branch) == set(branch)
        assert comp.case == INTERIOR and comp.weight_sum == 4

    def test_case1_star(self, star5):
        (comp,) = gamma0(star5).components
        zero_leaf = next(v for v in star5.neighbors(1) if star5.weight(v) == 0)
        assert set(comp.vertices) == {1, zero_leaf}
        assert comp.case == END

    def test_only_even_zero_segments(self):
        # Two branching vertices joined by an even zero segment stay apart.
        w = {1: 3, 2: -2, 3: -2, 4: -4, 5: -2, 6: -2, 7: 0, 8: 0, 9: -5}
        edges = [(1, 2), (1, 3), (4, 5), (4, 6), (1, 7), (7, 8), (8, 9), (9, 4)]
        dec = gamma0(WeightedGraph(w, edges))
        assert sorted(c.branch for c in dec.components) == [(1,), (4,)]
        assert {c.case for c in dec.components} == {INTERIOR}
        assert sorted(c.weight_sum for c in dec.components) == [-4, 3]

    def test_direct_branch_edge_does_not_join(self):
        g = WeightedGraph({1: 1, 2: 2, 3: -2, 4: -2, 5: -2, 6: -2}, [(1, 2), (1, 3), (1, 4), (2, 5), (2, 6)])
        assert len(gamma0(g).components) == 2


class TestShift:
    def test_paper_tree_connector(self):
        g, (v1, v2) = paper_tree([2, -3])
        seg = next(s for s in segments(g) if s.kind == "inner")
        h, trace = shift_across_segment(g, seg, 2, toward=v2)
        assert (h.weight(v1), h.weight(v2)) == (0, -1)
        assert len(trace) == 2 and apply_trace(g, trace) == h

    def test_end_segment(self, star5):
        seg = next(s for s in segments(star5) if s.weights == (0,))
        h, trace = shift_across_segment(star5, seg, -5, toward=1)
        assert h.weight(1) == 0 and len(trace) == 5
        assert apply_trace(star5, trace) == h

    def test_zero_is_identity(self, star5):
        seg = next(s for s in segments(star5) if s.weights == (0,))
        h, trace = shift_across_segment(star5, seg, 0, toward=1)
        assert h == star5 and len(trace) == 0

    @pytest.mark.parametrize("zeros", [1, 3, 5])
    @pytest.mark.parametrize("s", [-3, -1, 2])
    def test_long_segments(self, zeros, s):
        # Two branching vertices joined by [[0]*zeros], and a pendant [[0]*zeros].
        w = {1: 1, 2: -2, 3: -2, 4: 4, 5: -2, 6: -2}
        edges = [(1, 2), (1, 3), (4, 5), (4, 6)]
        prev = 1
        for i in range(zeros):
            w[10 + i] = 0
            edges.append((prev, 10 + i))
            prev = 10 + i
        edges.append((prev, 4))
        prev = 4
        for i in range(zeros):
            w[30 + i] = 0
            edges.append((prev, 30 + i))
            prev = 30 + i
        g = WeightedGraph(w, edges)
        inner = next(s for s in segments(g) if s.kind == "inner")
        h, trace = shift_across_segment(g, inner, s, toward=4)
        assert (h.weight(1), h.weight(4)) == (1 - s, 4 + s)
        assert all(h.weight(v) == g.weight(v) for v in g.vertices if v not in (1, 4))
        assert apply_trace(g, trace) == h
        end = next(x for x in segments(g) if x.kind == "end" and x.zero_block)
        h, trace = shift_across_segment(g, end, s, toward=4)
        assert h.weight(4) == 4 + s and apply_trace(g, trace) == h

    def test_rejects_even_segment(self):
        g = star(1, [[0, 0], [-2], [-2]])
        seg = next(s for s in segments(g) if s.weights == (0, 0))
        with pytest.raises(NotStandardError):
            shift_across_segment(g, seg, 1, toward=1)


class TestNormalize:
    def test_paper_tree(self, tree3):
        g, branch = tree3
        h, trace = normalize_branch_weights(g)
        assert tuple(h.weight(b) for b in branch) == (0, 0, 4)
        assert apply_trace(g, trace) == h
        assert all(h.weight(v) == g.weight(v) for v in g.vertices if v not in branch)

    def test_case1_star(self, star5):
        h, trace = normalize_branch_weights(star5)
        assert h.weight(1) == 0 and apply_trace(star5, trace) == h

    def test_fixed_point(self, tree3):
        h, _ = normalize_branch_weights(tree3[0])
        again, trace = normalize_branch_weights(h)
        assert again == h and len(trace) == 0

    @settings(max_examples=80, deadline=None)
    @given(st.integers(0, 100_000))
    def test_random_replay_and_sums(self, seed):
        rng = random.Random(seed)
        g = random_standard_tree(rng, rng.randint(4, 14))
        h, trace = normalize_branch_weights(g)
        assert apply_trace(g, trace) == h
        assert abs(intersection_determinant(h)) == abs(intersection_determinant(g))
        before = {c.vertices: (c.case, c.weight_sum) for c in gamma0(g).components}
        for c in gamma0(h).components:
            case, total = before[c.vertices]
            nonzero = [h.weight(b) for b in c.branch if h.weight(b)]
            if case == END:
                assert nonzero == []
            else:
                assert sum(h.weight(b) for b in c.branch) == total and len(nonzero) <= 1


class TestCanonicalForm:
    def test_version_prefix(self, tree3):
        assert canonical_form(tree3[0]).encoding.startswith("bgc1:T:")
        assert canonical_form(WeightedGraph.chain([0, 0, -2])).encoding == "bgc1:L:2:-2"

    def test_paper_tree_classes(self, tree3):
        g = tree3[0]
        assert canonical_form(g) == canonical_form(paper_tree([0, 4, 0])[0])
        assert canonical_form(g) != canonical_form(paper_tree([0, 0, 5])[0])

    @pytest.mark.parametrize("ws, expected", [([1, 1, 2], True), ([4, 0, 0], True), ([0, 0, 5], False), ([-1, 0, 5], True)])
    def test_equivalent_paper_tree(self, tree3, ws, expected):
        assert equivalent(tree3[0], paper_tree(ws)[0]) is expected

    def test_case1_freedom(self):
        assert equivalent(case1_star(5), case1_star(-7))

    def test_chains(self):
        assert not equivalent(WeightedGraph.chain([0, 0, -2]), WeightedGraph.chain([0, 0, -3]))
        assert equivalent(WeightedGraph.chain([0, 0, -2, -3]), WeightedGraph.chain([-2, -3, 0, 0]))

    def test_chain_vs_cycle(self):
        assert not equivalent(WeightedGraph.chain([0, 0, -2]), WeightedGraph.cycle([0, 0, -2]))

    def test_non_standard_rejected(self):
        with pytest.raises(NotStandardError):
            canonical_form(WeightedGraph.chain([0, -2]))
        with pytest.raises(NotStandardError):
            canonical_form(star(1, [[-1], [-2], [-2]]))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 100_000))
    def test_relabeling_invariance(self, seed):
        rng = random.Random(seed)
        g = random_standard_tree(rng, rng.randint(2, 14))
        ids = list(g.vertices)
        new = rng.sample(range(1, 1000), len(ids))
        h = g.relabel(dict(zip(ids, new)))
        assert canonical_form(h).encoding == canonical_form(g).encoding

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 100_000))
    def test_reversion_invariance(self, seed):
        rng = random.Random(seed)
        g = random_standard_tree(rng, rng.randint(2, 14))
        for s in segments(g):
            if s.is_standard and s.zero_block and s.tail:
                assert canonical_form(reverse_segment(g, s.vertices)) == canonical_form(g)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 100_000))
    def test_redistribution_invariance(self, seed):
        rng = random.Random(seed)
        g = random_standard_tree(rng, rng.randint(4, 14))
        base = canonical_form(g)
        for c in gamma0(g).components:
            if not c.branch or (len(c.branch) < 2 and c.case == INTERIOR):
                continue
            a, b = rng.sample(list(c.branch), 2) if len(c.branch) > 1 else (c.branch[0], c.branch[0])
            d = rng.randint(1, 3)
            moved = g.with_weights({a: g.weight(a) - d, b: g.weight(b) + d}) if a != b else g.with_weights({a: g.weight(a) + d})
            assert canonical_form(moved) == base
            if c.case == INTERIOR:
                assert canonical_form(g.with_weights({a: g.weight(a) + d})) != base

    def test_cycles(self):
        base = canonical_form(WeightedGraph.cycle([0, 0, -2, -3, -4]))
        for w in ([0, 0, -3, -4, -2], [0, 0, -4, -3, -2], [-2, 0, 0, -4, -3]):
            assert canonical_form(WeightedGraph.cycle(w)) == base
        assert canonical_form(WeightedGraph.cycle([0, 0, -2, -4, -3])) != canonical_form(WeightedGraph.cycle([0, 0, -2, -2, -3]))

    def test_normalized_witness_is_equivalent(self, tree3):
        form = canonical_form(tree3[0])
        assert canonical_form(form.normalized) == form
        assert branch_points(form.normalized) == branch_points(tree3[0])
