import numpy as np
import pytest
from sklearn.base import clone
from sklearn.pipeline import make_pipeline

from birgraph.canon import NotStandardError
from birgraph.estimators import (
    BranchWeightNormalizer,
    CanonicalFormEncoder,
    ChainStandardizer,
    check_graph,
    check_graphs,
)
from birgraph.fixtures import case1_star, paper_tree
from birgraph.graph import WeightedGraph, serialize_graph


def test_check_graph_accepts_text_and_graphs():
    g = WeightedGraph.chain([0, 0, -2])
    assert check_graph(g) is g
    assert check_graph("chain 0 0 -2") == g
    with pytest.raises(TypeError):
        check_graph(3)
    with pytest.raises(TypeError):
        check_graphs("chain 0")
    with pytest.raises(ValueError):
        check_graphs([])


def test_encoder_classes_and_predict():
    corpus = [case1_star(5), paper_tree([2, -3, 5])[0], serialize_graph(case1_star(1))]
    enc = CanonicalFormEncoder().fit(corpus)
    assert len(enc.classes_) == 2
    pred = enc.predict([case1_star(-7), paper_tree([1, 1, 2])[0], paper_tree([0, 0, 5])[0]])
    assert pred[0] >= 0 and pred[1] >= 0 and pred[2] == -1
    assert enc.transform([case1_star(0)])[0] == enc.classes_[pred[0]]


def test_get_params_and_clone():
    enc = CanonicalFormEncoder(unknown_value=-9)
    assert enc.get_params() == {"unknown_value": -9}
    assert clone(enc).unknown_value == -9
    assert ChainStandardizer(max_depth=20).get_params()["max_depth"] == 20


def test_normalizer_then_encoder_pipeline():
    g = paper_tree([2, -3, 5])[0]
    pipe = make_pipeline(BranchWeightNormalizer(), CanonicalFormEncoder())
    out = pipe.fit_transform([g, paper_tree([4, 0, 0])[0]])
    assert out[0] == out[1]


def test_normalizer_traces():
    ((h, trace),) = BranchWeightNormalizer(return_traces=True).fit_transform([case1_star(5)])
    assert h.weight(1) == 0 and len(trace) == 5


def test_normalizer_rejects_non_standard():
    with pytest.raises(NotStandardError):
        BranchWeightNormalizer().fit_transform(["chain 0 -2"])


def test_chain_standardizer():
    (out,) = ChainStandardizer().fit_transform(["chain -1 -1"])
    assert list(out.weights.values()) == [0]


def test_predict_before_fit():
    from sklearn.exceptions import NotFittedError

    with pytest.raises(NotFittedError):
        CanonicalFormEncoder().predict([case1_star()])


def test_transform_output_is_object_array():
    out = CanonicalFormEncoder().fit_transform([case1_star()])
    assert isinstance(out, np.ndarray) and out.dtype == object
