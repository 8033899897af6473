"""Brute-force references, finite differences and the axiom suite.

Nothing here calls into the span operators' internals: the oracles are plain
loops over the raw leg arrays or over tensor indices, so agreement between an
oracle and an operator is evidence rather than a tautology.
"""

import itertools
from dataclasses import dataclass, field
from math import fsum, prod

import numpy as np

from .errors import InvalidTrials, ShapeMismatch, SpaceMismatch
from .finset import FinMap, FinSet, compose
from .integration import FunVec, MeasVec, act, integrate, pair, pullback, pushforward
from .span import (
    ROLE_ASSIGNMENTS,
    ParametricSpan,
    backward_input,
    backward_measure,
    backward_weights,
    derived_operator,
    forward,
    permute_legs,
)

FLOAT_TOL = 1e-12
ADJOINT_TOL = 1e-9
GRAD_TOL = 1e-6
GRAD_STEP = 1e-5


def rel_error(a, b):
    """Elementwise ``|a-b| / max(1, |a|, |b|)``, reduced by max."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeMismatch(f"cannot compare shapes {a.shape} and {b.shape}")
    if a.size == 0:
        return 0.0, 0.0
    diff = np.abs(a - b)
    scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return float(diff.max()), float((diff / scale).max())


@dataclass
class CheckReport:
    name: str
    trials: int
    max_abs_error: float
    max_rel_error: float
    passed: bool
    seed: int
    tolerance: float = field(default=0.0, compare=False)

    def to_line(self):
        return "\t".join([
            self.name,
            str(self.trials),
            repr(self.max_abs_error),
            repr(self.max_rel_error),
            "true" if self.passed else "false",
            str(self.seed),
        ])


class _Tally:
    def __init__(self, name, seed, tolerance):
        self.name, self.seed, self.tolerance = name, seed, tolerance
        self.trials = 0
        self.max_abs = 0.0
        self.max_rel = 0.0

    def add(self, a, b):
        abs_err, rel_err = rel_error(a, b)
        self.max_abs = max(self.max_abs, abs_err)
        self.max_rel = max(self.max_rel, rel_err)

    def report(self):
        return CheckReport(
            self.name, self.trials, self.max_abs, self.max_rel,
            self.max_rel <= self.tolerance, self.seed, self.tolerance,
        )


# --------------------------------------------------------------------------
# reference computations

def matmul_oracle(x, W):
    x = [float(v) for v in x]
    W = [[float(v) for v in row] for row in W]
    if len(W) != len(x):
        raise ShapeMismatch(f"x has {len(x)} entries but W has {len(W)} rows")
    n_o = len(W[0]) if W else 0
    if any(len(row) != n_o for row in W):
        raise ShapeMismatch("ragged weight matrix")
    out = []
    for j in range(n_o):
        acc = 0.0
        for i in range(len(x)):
            acc += x[i] * W[i][j]
        out.append(acc)
    return out


def transposed_matmul_oracle(y, W):
    """``out[i] = sum_j W[i][j] * y[j]``."""
    y = [float(v) for v in y]
    out = []
    for row in W:
        if len(row) != len(y):
            raise ShapeMismatch(f"row of length {len(row)} against y of length {len(y)}")
        acc = 0.0
        for j in range(len(y)):
            acc += float(row[j]) * y[j]
        out.append(acc)
    return out


def _placements(n, f, stride, dilation):
    # enumerate valid window offsets rather than using a closed form
    count = 0
    while stride * count + dilation * (f - 1) <= n - 1:
        count += 1
    return count


def conv_oracle(x, spec, w):
    """Direct cross-correlation with stride and dilation, by nested loops.

    ``x`` has shape ``(n_i, *S_i)`` and ``w`` has shape ``(n_i, n_o, *F)``
    (flat inputs of the right size are reshaped).  Returns ``(n_o, *S_o)``.
    """
    n_i, n_o = spec.in_channels, spec.out_channels
    x_shape = (n_i,) + tuple(spec.input_shape)
    w_shape = (n_i, n_o) + tuple(spec.filter_shape)
    x = np.asarray(x, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if x.size != prod(x_shape):
        raise ShapeMismatch(f"input of size {x.size}, expected shape {x_shape}")
    if w.size != prod(w_shape):
        raise ShapeMismatch(f"kernel of size {w.size}, expected shape {w_shape}")
    x, w = x.reshape(x_shape), w.reshape(w_shape)
    out_shape = tuple(
        _placements(n, f, st, d)
        for n, f, st, d in zip(spec.input_shape, spec.filter_shape, spec.stride, spec.dilation)
    )
    out = np.zeros((n_o,) + out_shape)
    for co in range(n_o):
        for p in itertools.product(*map(range, out_shape)):
            acc = 0.0
            for ci in range(n_i):
                for f in itertools.product(*map(range, spec.filter_shape)):
                    pos = tuple(
                        d * fk + st * pk
                        for fk, pk, d, st in zip(f, p, spec.dilation, spec.stride)
                    )
                    acc += x[(ci,) + pos] * w[(ci, co) + f]
            out[(co,) + p] = acc
    return out


def adjoint_by_pairing(linear_map, y, in_shape):
    """Adjoint of ``linear_map`` applied to ``y``, from the pairing alone.

    Component ``i`` is ``<y, linear_map(e_i)>`` for the basis vector ``e_i``;
    no structural identity about the map is assumed.
    """
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    n = prod(in_shape)
    out = np.zeros(n)
    for i in range(n):
        basis = np.zeros(n)
        basis[i] = 1.0
        image = np.asarray(linear_map(basis.reshape(in_shape)), dtype=np.float64).reshape(-1)
        if image.size != y.size:
            raise ShapeMismatch(f"map output of size {image.size} against y of size {y.size}")
        out[i] = fsum((image * y).tolist())
    return out.reshape(in_shape)


def conv_input_adjoint_oracle(y, spec, w):
    x_shape = (spec.in_channels,) + tuple(spec.input_shape)
    return adjoint_by_pairing(lambda x: conv_oracle(x, spec, w), y, x_shape)


def graph_oracle(num_vertices, edges, bins, density, x, w):
    """Message passing by a plain loop over the edge list."""
    out = [0.0] * num_vertices
    if density is None:
        density = [1.0] * len(edges)
    for (p, q), b, m in zip(edges, bins, density):
        out[q] += float(x[p]) * float(w[b]) * float(m)
    return out


def pairing_oracle(span, x, y, w, mu):
    """``sum_e x[s(e)] y[t(e)] w[pi(e)] mu[e]`` in one loop over the apex."""
    for name, vec, space in (
        ("x", x, span.source.codomain),
        ("y", y, span.target.codomain),
        ("w", w, span.weightmap.codomain),
        ("mu", mu, span.apex),
    ):
        if vec.space != space:
            raise SpaceMismatch(f"{name} lives on {vec.space}, expected {space}", field=name)
    s, t, pi = span.source.targets, span.target.targets, span.weightmap.targets
    xv, yv, wv, mv = x.values, y.values, w.values, mu.density
    terms = []
    for e in range(span.apex.size):
        terms.append(xv[s[e]] * yv[t[e]] * wv[pi[e]] * mv[e])
    return fsum(terms)


def finite_diff_grad(loss, point, h=GRAD_STEP):
    if not h > 0:
        raise ValueError(f"step must be positive, got {h}")
    point = np.array(point, dtype=np.float64).reshape(-1)
    grad = np.zeros(len(point))
    for k in range(len(point)):
        probe = point.copy()
        probe[k] = point[k] + h
        plus = loss(probe)
        probe[k] = point[k] - h
        minus = loss(probe)
        grad[k] = (plus - minus) / (2 * h)
    return grad


# --------------------------------------------------------------------------
# random instances

def trial_rng(seed, stream, trial):
    """Independent generator per (seed, check, trial), so trials commute."""
    return np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, stream, trial])


def random_finmap(rng, domain, codomain):
    domain = domain if isinstance(domain, FinSet) else FinSet(domain)
    codomain = codomain if isinstance(codomain, FinSet) else FinSet(codomain)
    if codomain.size == 0 and domain.size:
        raise ValueError("no map from a non-empty set into the empty set")
    targets = rng.integers(0, max(codomain.size, 1), size=domain.size)
    return FinMap(domain, codomain, targets)


def random_size(rng, max_size, low=0):
    return int(rng.integers(low, max_size + 1))


def random_span(rng, max_size, max_apex=None):
    """Independent uniform legs; codomains are non-empty unless the apex is."""
    if max_apex is None:
        max_apex = max_size
    apex = FinSet(random_size(rng, max_apex))
    low = 1 if apex.size else 0
    legs = [random_finmap(rng, apex, random_size(rng, max(max_size, low), low)) for _ in range(3)]
    return ParametricSpan(apex, *legs)


def random_values(rng, n, integer=False):
    if integer:
        return rng.integers(-5, 6, size=n).astype(np.float64)
    return rng.uniform(-1.0, 1.0, size=n)


def random_funvec(rng, space, integer=False):
    return FunVec(space, random_values(rng, space.size, integer))


def random_measvec(rng, space, integer=False):
    return MeasVec(space, random_values(rng, space.size, integer))


def _random_map(rng, max_size):
    dom = random_size(rng, max_size)
    cod = random_size(rng, max_size, low=1 if dom else 0)
    return random_finmap(rng, dom, cod)


# --------------------------------------------------------------------------
# suites

def _frobenius(rng, max_size, integer):
    f = _random_map(rng, max_size)
    y = random_funvec(rng, f.codomain, integer)
    mu = random_measvec(rng, f.domain, integer)
    lhs = pushforward(f, act(pullback(f, y), mu))
    rhs = act(y, pushforward(f, mu))
    return lhs.density, rhs.density


def _naturality(rng, max_size, integer):
    f = _random_map(rng, max_size)
    mu = random_measvec(rng, f.domain, integer)
    return integrate(mu), integrate(pushforward(f, mu))


def _extranaturality(rng, max_size, integer):
    f = _random_map(rng, max_size)
    y = random_funvec(rng, f.codomain, integer)
    mu = random_measvec(rng, f.domain, integer)
    return pair(pullback(f, y), mu), pair(y, pushforward(f, mu))


def _composable(rng, max_size):
    f = _random_map(rng, max_size)
    cod = random_size(rng, max_size, low=1 if f.codomain.size else 0)
    g = random_finmap(rng, f.codomain, cod)
    return f, g


def _contravariance(rng, max_size, integer):
    f, g = _composable(rng, max_size)
    z = random_funvec(rng, g.codomain, integer)
    return pullback(compose(f, g), z).values, pullback(f, pullback(g, z)).values


def _covariance(rng, max_size, integer):
    f, g = _composable(rng, max_size)
    mu = random_measvec(rng, f.domain, integer)
    return pushforward(compose(f, g), mu).density, pushforward(g, pushforward(f, mu)).density


def _span_inputs(rng, span, integer):
    return (
        random_funvec(rng, span.input_space, integer),
        random_funvec(rng, span.output_space, integer),
        random_funvec(rng, span.weight_space, integer),
        random_measvec(rng, span.apex, integer),
    )


def _adjoint(rng, max_size, integer, max_apex):
    span = random_span(rng, max_size, max_apex)
    x, y, w, mu = _span_inputs(rng, span, integer)
    out_side = pair(y, forward(span, x, w, mu))
    in_side = pair(x, backward_input(span, y, w, mu))
    brute = pairing_oracle(span, x, y, w, mu)
    return [out_side, out_side], [in_side, brute]


def _coherence(rng, max_size, integer, max_apex):
    span = random_span(rng, max_size, max_apex)
    got, want = [], []
    for assignment in ROLE_ASSIGNMENTS:
        permuted = permute_legs(span, assignment)
        a = random_funvec(rng, permuted.input_space, integer)
        b = random_funvec(rng, permuted.weight_space, integer)
        mu = random_measvec(rng, span.apex, integer)
        got.append(forward(permuted, a, b, mu).density)
        want.append(derived_operator(span, assignment)(a, b, mu).density)
    return np.concatenate(got), np.concatenate(want)


# (name, function, integer-valued inputs, tolerance, needs apex bound)
_AXIOMS = (
    ("frobenius_reciprocity", _frobenius, False, FLOAT_TOL, False),
    ("frobenius_reciprocity_int", _frobenius, True, 0.0, False),
    ("integral_naturality", _naturality, False, FLOAT_TOL, False),
    ("integral_naturality_int", _naturality, True, 0.0, False),
    ("extranaturality", _extranaturality, False, FLOAT_TOL, False),
    ("extranaturality_int", _extranaturality, True, 0.0, False),
    ("contravariant_functoriality", _contravariance, True, 0.0, False),
    ("covariant_functoriality", _covariance, True, 0.0, False),
    ("adjoint_identity", _adjoint, False, ADJOINT_TOL, True),
    ("adjoint_identity_int", _adjoint, True, 0.0, True),
    ("leg_permutation_coherence", _coherence, False, 0.0, True),
)


def run_axiom_suite(seed, trials, max_size, max_apex=1000):
    """One report per law, each over ``trials`` random instances.

    Spaces have at most ``max_size`` elements; span apexes at most
    ``max_apex``.  Float laws are held to relative 1e-12 (1e-9 for the
    adjoint identity over large apexes); integer-valued variants and the
    purely combinatorial laws must hold exactly.
    """
    if trials < 1:
        raise InvalidTrials(f"need at least one trial, got {trials}", field="trials")
    reports = []
    for stream, (name, check, integer, tol, spans) in enumerate(_AXIOMS):
        tally = _Tally(name, seed, tol)
        for trial in range(trials):
            rng = trial_rng(seed, stream, trial)
            if spans:
                lhs, rhs = check(rng, max_size, integer, max_apex)
            else:
                lhs, rhs = check(rng, max_size, integer)
            tally.add(lhs, rhs)
            tally.trials += 1
        reports.append(tally.report())
    return reports


def gradcheck_span(span, rng, h=GRAD_STEP):
    """Analytic vs central-difference gradients of ``pair(y, forward(x, w, mu))``.

    Returns ``{"input": (analytic, numeric), "weights": ..., "measure": ...}``.
    """
    x, y, w, mu = _span_inputs(rng, span, integer=False)

    def loss(x_, w_, mu_):
        return pair(y, forward(span, x_, w_, mu_))

    X, W, E = span.input_space, span.weight_space, span.apex
    return {
        "input": (
            backward_input(span, y, w, mu).density,
            finite_diff_grad(lambda v: loss(FunVec(X, v), w, mu), x.values, h),
        ),
        "weights": (
            backward_weights(span, x, y, mu).density,
            finite_diff_grad(lambda v: loss(x, FunVec(W, v), mu), w.values, h),
        ),
        "measure": (
            backward_measure(span, x, y, w).values,
            finite_diff_grad(lambda v: loss(x, w, MeasVec(E, v)), mu.density, h),
        ),
    }


def run_gradcheck(spans, seed=0, trials=10, h=GRAD_STEP, tol=GRAD_TOL, prefix="gradcheck"):
    """Three reports (input, weights, measure).

    ``spans`` is a single span or a callable ``rng -> span`` drawing a fresh
    instance per trial.
    """
    if trials < 1:
        raise InvalidTrials(f"need at least one trial, got {trials}", field="trials")
    make = spans if callable(spans) else (lambda rng: spans)
    tallies = {
        wrt: _Tally(f"{prefix}_{wrt}", seed, tol) for wrt in ("input", "weights", "measure")
    }
    for trial in range(trials):
        rng = trial_rng(seed, 100, trial)
        results = gradcheck_span(make(rng), rng, h)
        for wrt, (analytic, numeric) in results.items():
            tallies[wrt].add(analytic, numeric)
            tallies[wrt].trials += 1
    return [t.report() for t in tallies.values()]
