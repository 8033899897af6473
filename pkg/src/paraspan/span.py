"""Parametric spans and their forward / reverse-mode operators.

A parametric span is three maps out of a common apex ``E`` (the edges)::

        source: E -> X   (input)
        target: E -> Y   (output)
        weightmap: E -> W  (weights)

``forward`` pulls the input and weights back to ``E``, multiplies them, acts
on the edge measure and pushes the result forward to ``Y``.  The reverse-mode
rules are the same contraction with the legs reassigned, which is what
:func:`permute_legs` makes literal.

All three operators share one elementwise grouping, ``(a[leg_a] * b[leg_b]) *
mu``.  Float multiplication is commutative, so a leg permutation reproduces
the corresponding derived operator bit for bit.
"""

import enum
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from . import _kernels
from .errors import DomainMismatch, SpaceMismatch, SpanError
from .finset import FinSet, build_fiber_index
from .integration import FunVec, MeasVec, act, pullback, pushforward

LEGS = ("source", "target", "weightmap")


class LegRole(enum.Enum):
    INPUT = "input"
    OUTPUT = "output"
    WEIGHT = "weight"


@dataclass(frozen=True)
class ParametricSpan:
    apex: FinSet
    source: object
    target: object
    weightmap: object

    def __post_init__(self):
        for name in LEGS:
            leg = getattr(self, name)
            if leg.domain != self.apex:
                raise DomainMismatch(
                    f"leg has domain {leg.domain} but the apex is {self.apex}", field=name
                )

    @property
    def input_space(self):
        return self.source.codomain

    @property
    def output_space(self):
        return self.target.codomain

    @property
    def weight_space(self):
        return self.weightmap.codomain

    def sizes(self):
        return {
            "E": self.apex.size,
            "X": self.input_space.size,
            "Y": self.output_space.size,
            "W": self.weight_space.size,
        }


def _check(vec, kind, space, name, leg):
    if not isinstance(vec, kind):
        raise TypeError(f"{name} must be a {kind.__name__}, got {type(vec).__name__}")
    if vec.space != space:
        what = "apex" if leg == "apex" else f"{leg} leg's codomain"
        raise SpaceMismatch(
            f"{name} lives on {vec.space} but the {what} is {space}", field=leg
        )


def _integrand(leg_a, a, leg_b, b, mu):
    return act(pullback(leg_a, a) * pullback(leg_b, b), mu)


def forward(span, x, w, mu):
    """Output measure ``t_*(s^*x . pi^*w . mu)`` on ``Y``."""
    _check(x, FunVec, span.input_space, "x", "source")
    _check(w, FunVec, span.weight_space, "w", "weightmap")
    _check(mu, MeasVec, span.apex, "mu", "apex")
    return pushforward(span.target, _integrand(span.source, x, span.weightmap, w, mu))


def backward_input(span, y, w, mu):
    """Input cotangent ``s_*(t^*y . pi^*w . mu)``, a measure on ``X``."""
    _check(y, FunVec, span.output_space, "y", "target")
    _check(w, FunVec, span.weight_space, "w", "weightmap")
    _check(mu, MeasVec, span.apex, "mu", "apex")
    return pushforward(span.source, _integrand(span.target, y, span.weightmap, w, mu))


def backward_weights(span, x, y, mu):
    """Weight cotangent ``pi_*(s^*x . t^*y . mu)``, a measure on ``W``."""
    _check(x, FunVec, span.input_space, "x", "source")
    _check(y, FunVec, span.output_space, "y", "target")
    _check(mu, MeasVec, span.apex, "mu", "apex")
    return pushforward(span.weightmap, _integrand(span.source, x, span.target, y, mu))


def backward_measure(span, x, y, w):
    """Gradient of ``integral_E s^*x . t^*y . pi^*w . mu`` in ``mu``."""
    _check(x, FunVec, span.input_space, "x", "source")
    _check(y, FunVec, span.output_space, "y", "target")
    _check(w, FunVec, span.weight_space, "w", "weightmap")
    return pullback(span.source, x) * pullback(span.target, y) * pullback(span.weightmap, w)


ROLE_ASSIGNMENTS = tuple(
    dict(zip(LEGS, roles)) for roles in permutations(LegRole)
)
IDENTITY_ASSIGNMENT = {
    "source": LegRole.INPUT,
    "target": LegRole.OUTPUT,
    "weightmap": LegRole.WEIGHT,
}


def _normalize_assignment(assignment):
    try:
        roles = {leg: LegRole(assignment[leg]) for leg in LEGS}
    except (KeyError, ValueError) as exc:
        raise SpanError(f"bad leg-role assignment {assignment!r}") from exc
    if set(roles.values()) != set(LegRole):
        raise SpanError(f"leg-role assignment is not a bijection: {assignment!r}")
    return roles


def permute_legs(span, assignment):
    """Reassign the legs of ``span``.

    ``assignment`` maps each leg name (``"source"``, ``"target"``,
    ``"weightmap"``) to the :class:`LegRole` it should play in the new span.
    """
    roles = _normalize_assignment(assignment)
    by_role = {role: getattr(span, leg) for leg, role in roles.items()}
    return ParametricSpan(
        span.apex,
        source=by_role[LegRole.INPUT],
        target=by_role[LegRole.OUTPUT],
        weightmap=by_role[LegRole.WEIGHT],
    )


def derived_operator(span, assignment):
    """The operator of ``span`` that ``forward`` on the permuted span computes.

    Returns ``op(a, b, mu)`` where ``a`` and ``b`` are the input and weight
    arguments of the permuted span's ``forward``.
    """
    roles = _normalize_assignment(assignment)
    leg_of = {role: leg for leg, role in roles.items()}
    a_leg, b_leg = leg_of[LegRole.INPUT], leg_of[LegRole.WEIGHT]
    out_leg = leg_of[LegRole.OUTPUT]

    def op(a, b, mu):
        args = {a_leg: a, b_leg: b}
        if out_leg == "target":
            return forward(span, args["source"], args["weightmap"], mu)
        if out_leg == "source":
            return backward_input(span, args["target"], args["weightmap"], mu)
        return backward_weights(span, args["source"], args["target"], mu)

    return op


@dataclass(frozen=True, eq=False)
class IndexedSpan:
    """A span with every leg's fibers precomputed.

    For each output leg the other two legs are pre-gathered into fiber order,
    so a contraction is one pass over ``E`` with no scatter.
    """

    span: ParametricSpan
    by_target: object
    by_source: object
    by_weight: object
    _plans: dict = field(repr=False)

    def _run(self, out_leg, a, b, mu):
        offsets, members, ga, gb = self._plans[out_leg]
        out = np.empty(len(offsets) - 1)
        _kernels.fiber_contract(offsets, members, ga, a, gb, b, mu, out)
        return out

    def forward(self, x, w, mu):
        s = self.span
        _check(x, FunVec, s.input_space, "x", "source")
        _check(w, FunVec, s.weight_space, "w", "weightmap")
        _check(mu, MeasVec, s.apex, "mu", "apex")
        return MeasVec(s.output_space, self._run("target", x.values, w.values, mu.density))

    def backward_input(self, y, w, mu):
        s = self.span
        _check(y, FunVec, s.output_space, "y", "target")
        _check(w, FunVec, s.weight_space, "w", "weightmap")
        _check(mu, MeasVec, s.apex, "mu", "apex")
        return MeasVec(s.input_space, self._run("source", y.values, w.values, mu.density))

    def backward_weights(self, x, y, mu):
        s = self.span
        _check(x, FunVec, s.input_space, "x", "source")
        _check(y, FunVec, s.output_space, "y", "target")
        _check(mu, MeasVec, s.apex, "mu", "apex")
        return MeasVec(s.weight_space, self._run("weightmap", x.values, y.values, mu.density))


# output leg -> (first factor leg, second factor leg), matching the naive path
_FACTORS = {
    "target": ("source", "weightmap"),
    "source": ("target", "weightmap"),
    "weightmap": ("source", "target"),
}


def compile(span):
    indices = {leg: build_fiber_index(getattr(span, leg)) for leg in LEGS}
    plans = {}
    for out_leg, (a_leg, b_leg) in _FACTORS.items():
        idx = indices[out_leg]
        members = idx.members
        ga = np.ascontiguousarray(getattr(span, a_leg).targets[members])
        gb = np.ascontiguousarray(getattr(span, b_leg).targets[members])
        plans[out_leg] = (idx.offsets, members, ga, gb)
    return IndexedSpan(
        span,
        by_target=indices["target"],
        by_source=indices["source"],
        by_weight=indices["weightmap"],
        _plans=plans,
    )


def forward_indexed(indexed, x, w, mu):
    return indexed.forward(x, w, mu)


def backward_input_indexed(indexed, y, w, mu):
    return indexed.backward_input(y, w, mu)


def backward_weights_indexed(indexed, x, y, mu):
    return indexed.backward_weights(x, y, mu)


def default_measure(span):
    return MeasVec.counting(span.apex)
