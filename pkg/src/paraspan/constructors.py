"""Dense, convolutional and graph layers as parametric spans."""

from dataclasses import dataclass
from math import floor, prod

import numpy as np

from .errors import FilterTooLarge, InvalidSize, LengthMismatch, OutOfRange, ShapeMismatch
from .finset import FinMap, FinSet, identity, product_coordinates, ravel_coordinates
from .integration import MeasVec
from .span import ParametricSpan


def _positive(value, name):
    value = int(value)
    if value < 1:
        raise InvalidSize(f"must be a positive integer, got {value}", field=name)
    return value


def _positive_tuple(values, name):
    return tuple(_positive(v, name) for v in values)


def dense_span(n_i, n_o):
    """Apex ``n_i x n_o``; source and target are the two projections and the
    weight leg is the identity (no weight sharing)."""
    n_i, n_o = _positive(n_i, "n_i"), _positive(n_o, "n_o")
    apex = FinSet(n_i * n_o)
    i, j = product_coordinates((n_i, n_o))
    return ParametricSpan(
        apex,
        source=FinMap(apex, FinSet(n_i), i),
        target=FinMap(apex, FinSet(n_o), j),
        weightmap=identity(apex),
    )


@dataclass(frozen=True)
class ConvSpec:
    in_channels: int
    out_channels: int
    input_shape: tuple
    filter_shape: tuple
    stride: tuple = None
    dilation: tuple = None

    def __post_init__(self):
        input_shape = _positive_tuple(self.input_shape, "input_shape")
        rank = len(input_shape)
        if rank < 1:
            raise ShapeMismatch("convolution needs at least one spatial axis", field="input_shape")
        set_ = lambda name, v: object.__setattr__(self, name, v)  # noqa: E731
        set_("in_channels", _positive(self.in_channels, "in_channels"))
        set_("out_channels", _positive(self.out_channels, "out_channels"))
        set_("input_shape", input_shape)
        for name in ("filter_shape", "stride", "dilation"):
            value = getattr(self, name)
            value = (1,) * rank if value is None else _positive_tuple(value, name)
            if len(value) != rank:
                raise ShapeMismatch(
                    f"rank {len(value)} does not match input rank {rank}", field=name
                )
            set_(name, value)

    @property
    def rank(self):
        return len(self.input_shape)


def conv_output_shape(spec):
    """Valid (unpadded) output shape: one output per filter placement."""
    out = []
    for k, (n, f, st, d) in enumerate(
        zip(spec.input_shape, spec.filter_shape, spec.stride, spec.dilation)
    ):
        extent = d * (f - 1) + 1
        if extent > n:
            raise FilterTooLarge(
                f"dilated filter extent {extent} exceeds input size {n} on axis {k}",
                field="filter_shape",
            )
        out.append((n - extent) // st + 1)
    return tuple(out)


def conv_span(spec):
    """Apex ``n_i x n_o x F x S_o``.

    The source leg sends ``(c_i, c_o, f, p)`` to ``(c_i, d*f + stride*p)``, so
    ``forward`` is a cross-correlation (the kernel is not flipped).
    """
    out_shape = conv_output_shape(spec)
    n_i, n_o, r = spec.in_channels, spec.out_channels, spec.rank
    apex_shape = (n_i, n_o) + spec.filter_shape + out_shape
    apex = FinSet(prod(apex_shape))
    coords = product_coordinates(apex_shape)
    ci, co = coords[0], coords[1]
    f, p = coords[2:2 + r], coords[2 + r:]

    positions = [d * fk + st * pk for fk, pk, d, st in zip(f, p, spec.dilation, spec.stride)]
    x_shape = (n_i,) + spec.input_shape
    w_shape = (n_i, n_o) + spec.filter_shape
    y_shape = (n_o,) + out_shape
    return ParametricSpan(
        apex,
        source=FinMap(apex, FinSet(prod(x_shape)), ravel_coordinates([ci, *positions], x_shape)),
        target=FinMap(apex, FinSet(prod(y_shape)), ravel_coordinates([co, *p], y_shape)),
        weightmap=FinMap(apex, FinSet(prod(w_shape)), ravel_coordinates([ci, co, *f], w_shape)),
    )


@dataclass(frozen=True)
class GraphSpec:
    """Edges ``(p, q)`` carry input at ``p`` to output at ``q``; each edge
    shares the weight of its bin."""

    num_vertices: int
    edges: tuple
    bin_of_edge: tuple
    num_bins: int
    edge_density: tuple = None

    def __post_init__(self):
        set_ = lambda name, v: object.__setattr__(self, name, v)  # noqa: E731
        set_("num_vertices", _positive(self.num_vertices, "num_vertices"))
        set_("num_bins", _positive(self.num_bins, "num_bins"))
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2) if len(self.edges) \
            else np.zeros((0, 2), dtype=np.int64)
        bins = np.asarray(self.bin_of_edge, dtype=np.int64).reshape(-1)
        if len(bins) != len(edges):
            raise LengthMismatch(
                f"{len(bins)} bins for {len(edges)} edges", field="bin_of_edge"
            )
        if edges.size and (edges.min() < 0 or edges.max() >= self.num_vertices):
            raise OutOfRange(
                f"edge endpoint outside 0..{self.num_vertices - 1}", field="edges"
            )
        if bins.size and (bins.min() < 0 or bins.max() >= self.num_bins):
            raise OutOfRange(f"bin index outside 0..{self.num_bins - 1}", field="bin_of_edge")
        set_("edges", tuple(map(tuple, edges.tolist())))
        set_("bin_of_edge", tuple(bins.tolist()))
        if self.edge_density is not None:
            density = tuple(float(v) for v in self.edge_density)
            if len(density) != len(edges):
                raise LengthMismatch(
                    f"{len(density)} densities for {len(edges)} edges", field="edge_density"
                )
            set_("edge_density", density)


def graph_span(spec):
    """Returns the span and its edge measure (``edge_density``, default ones)."""
    edges = np.asarray(spec.edges, dtype=np.int64).reshape(-1, 2)
    apex = FinSet(len(edges))
    vertices = FinSet(spec.num_vertices)
    span = ParametricSpan(
        apex,
        source=FinMap(apex, vertices, edges[:, 0]),
        target=FinMap(apex, vertices, edges[:, 1]),
        weightmap=FinMap(apex, FinSet(spec.num_bins), np.asarray(spec.bin_of_edge, dtype=np.int64)),
    )
    if spec.edge_density is None:
        mu = MeasVec.counting(apex)
    else:
        mu = MeasVec(apex, spec.edge_density)
    return span, mu


def bin_pseudo_coordinates(coords, grid):
    """Hard-assign each ``r``-dimensional coordinate to a cell of a uniform grid.

    ``grid`` is one ``(low, high, bins)`` triple per dimension; out-of-range
    coordinates clamp to the boundary cells.  Cells are numbered row-major.
    """
    grid = [(float(lo), float(hi), int(n)) for lo, hi, n in grid]
    for k, (lo, hi, n) in enumerate(grid):
        if n < 1:
            raise InvalidSize(f"need at least one bin on axis {k}", field="grid")
        if not lo < hi:
            raise InvalidSize(f"empty interval [{lo}, {hi}] on axis {k}", field="grid")
    out = []
    for u in coords:
        u = (u,) if np.ndim(u) == 0 else tuple(u)
        if len(u) != len(grid):
            raise ShapeMismatch(f"coordinate of rank {len(u)} for a rank-{len(grid)} grid")
        flat = 0
        for uk, (lo, hi, n) in zip(u, grid):
            cell = min(max(floor((uk - lo) / (hi - lo) * n), 0), n - 1)
            flat = flat * n + cell
        out.append(flat)
    return out
