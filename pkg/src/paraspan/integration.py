"""The finite-set integration theory.

``FunVec`` is a function on a finite set (contravariant: pulled back along
maps); ``MeasVec`` is a signed measure, stored as a density against counting
measure (covariant: pushed forward along maps).  Both are float64 vectors of
the same length, and they are kept as distinct types on purpose: mixing up
which side of a pairing a vector lives on is exactly the bug this library is
meant to rule out.
"""

from dataclasses import dataclass
from math import fsum
from numbers import Real

import numpy as np

from .errors import LengthMismatch, SpaceMismatch
from .finset import FinSet


def _as_space(space):
    return space if isinstance(space, FinSet) else FinSet(space)


def _frozen_floats(data, space):
    arr = np.array(data, dtype=np.float64, copy=True).reshape(-1)
    if len(arr) != space.size:
        raise LengthMismatch(f"expected {space.size} entries, got {len(arr)}")
    arr.setflags(write=False)
    return arr


class _Vec:
    __slots__ = ()

    def _check_same(self, other, what):
        if type(other) is not type(self):
            raise TypeError(f"cannot {what} {type(self).__name__} and {type(other).__name__}")
        if other.space != self.space:
            raise SpaceMismatch(f"cannot {what} vectors on {self.space} and {other.space}")

    @property
    def data(self):
        raise NotImplementedError

    def __len__(self):
        return self.space.size

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.data, other.data)

    def __add__(self, other):
        self._check_same(other, "add")
        return type(self)(self.space, self.data + other.data)

    def __sub__(self, other):
        self._check_same(other, "subtract")
        return type(self)(self.space, self.data - other.data)

    def __neg__(self):
        return type(self)(self.space, -self.data)

    def __rmul__(self, scalar):
        if isinstance(scalar, Real):
            return type(self)(self.space, float(scalar) * self.data)
        return NotImplemented

    def tolist(self):
        return self.data.tolist()


@dataclass(frozen=True, eq=False)
class FunVec(_Vec):
    """An element of the function algebra on ``space``."""

    space: FinSet
    values: np.ndarray

    def __post_init__(self):
        space = _as_space(self.space)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "values", _frozen_floats(self.values, space))

    @property
    def data(self):
        return self.values

    def __mul__(self, other):
        # pointwise algebra product, or scaling by a real
        if isinstance(other, FunVec):
            self._check_same(other, "multiply")
            return FunVec(self.space, self.values * other.values)
        if isinstance(other, Real):
            return FunVec(self.space, self.values * float(other))
        return NotImplemented

    def __repr__(self):
        return f"FunVec({self.space.size}, {self.values.tolist()})"

    @classmethod
    def ones(cls, space):
        space = _as_space(space)
        return cls(space, np.ones(space.size))

    @classmethod
    def zeros(cls, space):
        space = _as_space(space)
        return cls(space, np.zeros(space.size))


@dataclass(frozen=True, eq=False)
class MeasVec(_Vec):
    """A signed measure on ``space``, as a density against counting measure."""

    space: FinSet
    density: np.ndarray

    def __post_init__(self):
        space = _as_space(self.space)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "density", _frozen_floats(self.density, space))

    @property
    def data(self):
        return self.density

    def __mul__(self, other):
        if isinstance(other, Real):
            return MeasVec(self.space, self.density * float(other))
        return NotImplemented

    def __repr__(self):
        return f"MeasVec({self.space.size}, {self.density.tolist()})"

    @classmethod
    def counting(cls, space):
        space = _as_space(space)
        return cls(space, np.ones(space.size))

    @classmethod
    def zeros(cls, space):
        space = _as_space(space)
        return cls(space, np.zeros(space.size))


def _require(vec, kind, space, name, where):
    if not isinstance(vec, kind):
        raise TypeError(f"{name} must be a {kind.__name__}, got {type(vec).__name__}")
    if vec.space != space:
        raise SpaceMismatch(f"{name} lives on {vec.space} but {where} is {space}", field=name)


def pullback(f, y):
    """Precompose ``y`` with ``f``: ``(f^* y)[e] = y[f(e)]``."""
    _require(y, FunVec, f.codomain, "y", "the map's codomain")
    return FunVec(f.domain, y.values[f.targets])


def _fiber_sums(targets, weights, size):
    # bincount adds in increasing domain order, i.e. fiber-member order
    return np.bincount(targets, weights=weights, minlength=size).astype(np.float64, copy=False)


def pushforward(f, mu):
    """Sum ``mu`` over the fibers of ``f``."""
    _require(mu, MeasVec, f.domain, "mu", "the map's domain")
    return MeasVec(f.codomain, _fiber_sums(f.targets, mu.density, f.codomain.size))


def act(x, mu):
    if not isinstance(x, FunVec):
        raise TypeError(f"x must be a FunVec, got {type(x).__name__}")
    _require(mu, MeasVec, x.space, "mu", "the function's space")
    return MeasVec(x.space, x.values * mu.density)


def integrate(mu):
    if not isinstance(mu, MeasVec):
        raise TypeError(f"can only integrate a MeasVec, got {type(mu).__name__}")
    return fsum(mu.density.tolist())


def pair(x, mu):
    """``integrate(act(x, mu))`` without materialising the product measure."""
    if not isinstance(x, FunVec):
        raise TypeError(f"x must be a FunVec, got {type(x).__name__}")
    _require(mu, MeasVec, x.space, "mu", "the function's space")
    return fsum((x.values * mu.density).tolist())
