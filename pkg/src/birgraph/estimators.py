"""scikit-learn style wrappers so graph corpora can sit in a Pipeline.

Inputs may be ``WeightedGraph`` objects or ``.wg`` text; ``check_graphs``
normalizes either into a list of graphs.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .canon import NotStandardError, canonical_form, normalize_branch_weights
from .graph import WeightedGraph, is_standard, parse_graph
from .oracle import SearchBounds, standardize_chain


def check_graph(g) -> WeightedGraph:
    """Accept a graph or its text form, reject anything else."""
    if isinstance(g, WeightedGraph):
        return g
    if isinstance(g, str):
        return parse_graph(g)
    raise TypeError(f"expected WeightedGraph or graph text, got {type(g).__name__}")


def check_graphs(X) -> list[WeightedGraph]:
    if isinstance(X, (str, WeightedGraph)):
        raise TypeError("expected a sequence of graphs, got a single graph")
    out = [check_graph(g) for g in X]
    if not out:
        raise ValueError("empty input: at least one graph is required")
    return out


def check_standard(g) -> WeightedGraph:
    g = check_graph(g)
    if not is_standard(g):
        raise NotStandardError("graph is not standard")
    return g


class BranchWeightNormalizer(BaseEstimator, TransformerMixin):
    """Move branching weight to canonical roots; stateless."""

    def __init__(self, return_traces: bool = False):
        self.return_traces = return_traces

    def fit(self, X, y=None):
        self.n_graphs_seen_ = len(check_graphs(X))
        return self

    def transform(self, X):
        out = []
        for g in check_graphs(X):
            g = check_standard(g)
            if g.is_circular or g.is_chain:
                h, t = g, None
            else:
                h, t = normalize_branch_weights(g)
            out.append((h, t) if self.return_traces else h)
        return out


class CanonicalFormEncoder(BaseEstimator, TransformerMixin):
    """Map standard graphs to canonical encodings.

    ``fit`` records the distinct encodings seen as ``classes_``;
    ``predict`` returns the index of each graph's class, or -1 when unseen.
    """

    def __init__(self, unknown_value: int = -1):
        self.unknown_value = unknown_value

    def fit(self, X, y=None):
        self.classes_ = np.array(sorted(set(self.transform(X))), dtype=object)
        return self

    def transform(self, X):
        return np.array([canonical_form(check_standard(g)).encoding for g in check_graphs(X)], dtype=object)

    def predict(self, X):
        check_is_fitted(self, "classes_")
        index = {c: i for i, c in enumerate(self.classes_)}
        return np.array([index.get(e, self.unknown_value) for e in self.transform(X)])


class ChainStandardizer(BaseEstimator, TransformerMixin):
    """Bring linear chains to standard form by bounded search."""

    def __init__(self, max_depth: int = 40, max_states: int = 200_000):
        self.max_depth = max_depth
        self.max_states = max_states

    def fit(self, X, y=None):
        check_graphs(X)
        return self

    def transform(self, X):
        bounds = SearchBounds(max_depth=self.max_depth, max_states=self.max_states)
        return [standardize_chain(g, bounds)[0] for g in check_graphs(X)]
