"""Linear neural-network layers as parametric spans over finite sets.

A layer is a span ``X <-s- E -t-> Y`` with a weight-sharing leg ``E -pi-> W``.
Its forward pass pulls the input and weights back to the edges, multiplies by
an edge measure and sums over the fibers of ``t``; each reverse-mode rule is
the same contraction with the legs permuted.
"""

from .constructors import (
    ConvSpec,
    GraphSpec,
    bin_pseudo_coordinates,
    conv_output_shape,
    conv_span,
    dense_span,
    graph_span,
)
from .errors import (
    DomainMismatch,
    FilterTooLarge,
    InvalidSize,
    InvalidTrials,
    LengthMismatch,
    OutOfRange,
    ShapeMismatch,
    SpaceMismatch,
    SpanError,
)
from .finset import (
    FiberIndex,
    FinMap,
    FinSet,
    build_fiber_index,
    compose,
    flatten_index,
    identity,
    make_finmap,
    unflatten_index,
)
from .integration import FunVec, MeasVec, act, integrate, pair, pullback, pushforward
from .span import (
    IndexedSpan,
    LegRole,
    ParametricSpan,
    backward_input,
    backward_input_indexed,
    backward_measure,
    backward_weights,
    backward_weights_indexed,
    compile,
    forward,
    forward_indexed,
    permute_legs,
)

__version__ = "0.1.0"

__all__ = [
    "ConvSpec",
    "DomainMismatch",
    "FiberIndex",
    "FilterTooLarge",
    "FinMap",
    "FinSet",
    "FunVec",
    "GraphSpec",
    "IndexedSpan",
    "InvalidSize",
    "InvalidTrials",
    "LegRole",
    "LengthMismatch",
    "MeasVec",
    "OutOfRange",
    "ParametricSpan",
    "ShapeMismatch",
    "SpaceMismatch",
    "SpanError",
    "act",
    "backward_input",
    "backward_input_indexed",
    "backward_measure",
    "backward_weights",
    "backward_weights_indexed",
    "bin_pseudo_coordinates",
    "build_fiber_index",
    "compile",
    "compose",
    "conv_output_shape",
    "conv_span",
    "dense_span",
    "flatten_index",
    "forward",
    "forward_indexed",
    "graph_span",
    "identity",
    "integrate",
    "make_finmap",
    "pair",
    "permute_legs",
    "pullback",
    "pushforward",
    "unflatten_index",
]
