"""Birational calculus of integer-weighted trees and cycles.

Modules: ``graph`` (structure, parsing, segments), ``moves`` (blowups,
blowdowns, elementary moves, traces), ``canon`` (branching-weight
normalization, canonical forms), ``oracle`` (bounded search, invariant
fuzzing, chain standardization) and ``cli``.
"""

from .canon import (
    ENCODING_VERSION,
    CanonicalForm,
    Gamma0Component,
    Gamma0Decomposition,
    NotStandardError,
    canonical_form,
    equivalent,
    gamma0,
    normalize_branch_weights,
    shift_across_segment,
)
from .graph import (
    GraphError,
    ParseError,
    Segment,
    WeightedGraph,
    branch_points,
    graph_minus_segment,
    intersection_determinant,
    is_standard,
    parse_graph,
    segments,
    serialize_graph,
)
from .moves import (
    BlowDown,
    BlowUpAtVertex,
    BlowUpEdge,
    InnerElementary,
    MoveError,
    OuterElementary,
    ReverseSegment,
    Trace,
    TraceError,
    apply_trace,
    blow_down,
    blow_up_at_vertex,
    blow_up_edge,
    inner_elementary,
    invert_trace,
    outer_elementary,
    parse_trace,
    reverse_segment,
)
from .oracle import (
    SearchBounds,
    SearchExhausted,
    Verdict,
    check_invariants,
    explore,
    oracle_equivalent,
    standardize_chain,
)

__version__ = "0.1.0"
