"""Small named graphs used in examples, tests and the acceptance suite."""

from __future__ import annotations

from collections.abc import Sequence

from .graph import WeightedGraph


def paper_tree(weights: Sequence[int]) -> tuple[WeightedGraph, tuple[int, ...]]:
    """Branch vertices in a row, joined by single zero connectors, each with two ``-2`` leaves.

    Returns the graph and the branch vertex ids in order.
    """
    w: dict[int, int] = {}
    edges = []
    branch = []
    nid = 1
    prev = None
    for x in weights:
        b = nid
        nid += 1
        w[b] = x
        branch.append(b)
        if prev is not None:
            w[nid] = 0
            edges += [(prev, nid), (nid, b)]
            nid += 1
        for _ in range(2):
            w[nid] = -2
            edges.append((b, nid))
            nid += 1
        prev = b
    return WeightedGraph(w, edges), tuple(branch)


def star(center: int, arms: Sequence[Sequence[int]]) -> WeightedGraph:
    """Vertex 1 of weight ``center`` with one chain per arm, read outward."""
    w = {1: center}
    edges = []
    nid = 2
    for arm in arms:
        prev = 1
        for x in arm:
            w[nid] = x
            edges.append((prev, nid))
            prev = nid
            nid += 1
    return WeightedGraph(w, edges)


CASE1_ARMS = ((0,), (-2,), (-2, -3))


def case1_star(center: int = 5) -> WeightedGraph:
    """The star with arms [0], [-2], [-2,-3]; its zero leaf makes branch weight free."""
    return star(center, CASE1_ARMS)
