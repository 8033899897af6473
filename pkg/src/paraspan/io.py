"""JSON span and tensor files.

Span files come in four kinds (``dense``, ``conv``, ``graph``, ``raw``); every
kind decodes to a span plus its default edge measure.  Only ``raw`` is ever
written, with sorted keys so the encoding is canonical.
"""

import json
import math

import numpy as np

from .constructors import ConvSpec, GraphSpec, conv_output_shape, conv_span, dense_span, graph_span
from .errors import SpanError
from .finset import FinMap, FinSet
from .integration import FunVec, MeasVec
from .span import ParametricSpan


class FileFormatError(Exception):
    """Unreadable or structurally malformed file (a usage error, not an
    invariant violation)."""


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise FileFormatError(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: invalid JSON ({exc})") from exc


def dumps(doc):
    return json.dumps(doc, sort_keys=True) + "\n"


def write_json(path, doc):
    with open(path, "w") as fh:
        fh.write(dumps(doc))


def _field(doc, name, kind):
    if not isinstance(doc, dict):
        raise FileFormatError("expected a JSON object")
    if name not in doc:
        raise FileFormatError(f"missing field {name!r}")
    value = doc[name]
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise FileFormatError(f"field {name!r} must be an integer")
    elif not isinstance(value, kind):
        raise FileFormatError(f"field {name!r} must be a {kind.__name__}")
    return value


def _int_list(doc, name):
    values = _field(doc, name, list)
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in values):
        raise FileFormatError(f"field {name!r} must be a list of integers")
    return values


def _number_list(doc, name):
    values = _field(doc, name, list)
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise FileFormatError(f"field {name!r} must be a list of numbers")
    return [float(v) for v in values]


def _with_field(name, build):
    try:
        return build()
    except SpanError as exc:
        if exc.field is None:
            exc.field = name
        raise


def decode_span(doc):
    """Returns ``(span, default_mu, info)``; ``info`` holds extras such as the
    convolution output shape."""
    kind = _field(doc, "kind", str)
    info = {}
    if kind == "dense":
        n_i, n_o = _field(doc, "n_i", int), _field(doc, "n_o", int)
        span = dense_span(n_i, n_o)
        mu = None
    elif kind == "conv":
        spec = ConvSpec(
            _field(doc, "n_i", int),
            _field(doc, "n_o", int),
            tuple(_int_list(doc, "S_i")),
            tuple(_int_list(doc, "F")),
            tuple(_int_list(doc, "stride")),
            tuple(_int_list(doc, "dilation")),
        )
        info["S_o"] = list(conv_output_shape(spec))
        span = conv_span(spec)
        mu = None
    elif kind == "graph":
        edges = _field(doc, "edges", list)
        if not all(
            isinstance(e, list) and len(e) == 2
            and all(isinstance(v, int) and not isinstance(v, bool) for v in e)
            for e in edges
        ):
            raise FileFormatError("field 'edges' must be a list of [p, q] integer pairs")
        density = _number_list(doc, "density") if doc.get("density") is not None else None
        spec = GraphSpec(
            _field(doc, "vertices", int),
            [tuple(e) for e in edges],
            _int_list(doc, "bins"),
            _field(doc, "num_bins", int),
            density,
        )
        span, mu = graph_span(spec)
        if density is None:
            mu = None
    elif kind == "raw":
        apex = _with_field("E", lambda: FinSet(_field(doc, "E", int)))
        legs = {}
        for leg, key, cod in (("source", "s", "X"), ("target", "t", "Y"), ("weightmap", "pi", "W")):
            codomain = _with_field(cod, lambda: FinSet(_field(doc, cod, int)))
            targets = _int_list(doc, key)
            legs[leg] = _with_field(key, lambda: FinMap(apex, codomain, np.asarray(targets, dtype=np.int64)))
        span = ParametricSpan(apex, **legs)
        mu = None
        if doc.get("density") is not None:
            density = _number_list(doc, "density")
            mu = _with_field("density", lambda: MeasVec(apex, density))
    else:
        raise FileFormatError(f"unknown span kind {kind!r}")
    if mu is None:
        mu = MeasVec.counting(span.apex)
        info["explicit_density"] = False
    else:
        info["explicit_density"] = True
    return span, mu, info


def encode_span(span, mu=None):
    doc = {
        "kind": "raw",
        "E": span.apex.size,
        "X": span.input_space.size,
        "Y": span.output_space.size,
        "W": span.weight_space.size,
        "s": span.source.targets.tolist(),
        "t": span.target.targets.tolist(),
        "pi": span.weightmap.targets.tolist(),
    }
    if mu is not None:
        doc["density"] = mu.density.tolist()
    return doc


def load_span(path):
    return decode_span(read_json(path))


def _check_finite(values, key):
    if not all(math.isfinite(v) for v in values):
        raise FileFormatError(f"field {key!r} contains non-finite values")


def decode_tensor(doc, kind):
    """Decode a FunVec (``values``) or MeasVec (``density``) document."""
    key = "values" if kind is FunVec else "density"
    size = _field(doc, "space", int)
    if key not in doc:
        other = "density" if key == "values" else "values"
        hint = f" (found {other!r}: wrong variance)" if other in doc else ""
        raise FileFormatError(f"missing field {key!r}{hint}")
    values = _number_list(doc, key)
    _check_finite(values, key)
    space = _with_field("space", lambda: FinSet(size))
    return _with_field(key, lambda: kind(space, values))


def encode_tensor(vec):
    if isinstance(vec, FunVec):
        return {"space": vec.space.size, "values": vec.values.tolist()}
    return {"space": vec.space.size, "density": vec.density.tolist()}


def load_tensor(path, kind):
    return decode_tensor(read_json(path), kind)
