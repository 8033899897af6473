"""Finite sets, total maps between them, and fiber indices.

A finite set is just its cardinality; its elements are ``0 .. size-1``.  A map
is a flat integer array of target indices.  Product sets are realised by
row-major flattening (last axis fastest), see :func:`flatten_index`.
"""

from dataclasses import dataclass
from math import prod

import numpy as np

from .errors import DomainMismatch, LengthMismatch, OutOfRange


def _frozen(array, dtype):
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class FinSet:
    size: int

    def __post_init__(self):
        size = int(self.size)
        if size < 0:
            raise OutOfRange(f"cardinality must be non-negative, got {size}")
        object.__setattr__(self, "size", size)

    def __len__(self):
        return self.size

    def __repr__(self):
        return f"FinSet({self.size})"


@dataclass(frozen=True, eq=False)
class FinMap:
    """A total map ``domain -> codomain`` stored as its array of targets.

    Construct through :func:`make_finmap` (or the helpers below); the
    constructor itself validates too, so an invalid FinMap cannot exist.
    """

    domain: FinSet
    codomain: FinSet
    targets: np.ndarray

    def __post_init__(self):
        targets = np.asarray(self.targets)
        if targets.ndim != 1:
            targets = targets.reshape(-1)
        if targets.size and not np.issubdtype(targets.dtype, np.integer):
            if not np.all(np.equal(np.mod(targets, 1), 0)):
                raise OutOfRange("map targets must be integers")
        if len(targets) != self.domain.size:
            raise LengthMismatch(
                f"expected {self.domain.size} targets, got {len(targets)}"
            )
        if targets.size:
            lo, hi = targets.min(), targets.max()
            if lo < 0 or hi >= self.codomain.size:
                bad = lo if lo < 0 else hi
                raise OutOfRange(
                    f"target {int(bad)} outside codomain of size {self.codomain.size}"
                )
        object.__setattr__(self, "targets", _frozen(targets, np.int64))

    def __call__(self, e):
        return int(self.targets[e])

    def __eq__(self, other):
        if not isinstance(other, FinMap):
            return NotImplemented
        return (
            self.domain == other.domain
            and self.codomain == other.codomain
            and np.array_equal(self.targets, other.targets)
        )

    def __hash__(self):
        return hash((self.domain, self.codomain, self.targets.tobytes()))

    def __repr__(self):
        return f"FinMap({self.domain.size} -> {self.codomain.size}, {self.targets.tolist()})"

    def then(self, other):
        return compose(self, other)

    def __rshift__(self, other):
        return compose(self, other)


def make_finmap(domain, codomain, targets):
    if not isinstance(domain, FinSet):
        domain = FinSet(domain)
    if not isinstance(codomain, FinSet):
        codomain = FinSet(codomain)
    return FinMap(domain, codomain, np.asarray(targets))


def identity(space):
    if not isinstance(space, FinSet):
        space = FinSet(space)
    return FinMap(space, space, np.arange(space.size, dtype=np.int64))


def constant(domain, codomain, value=0):
    if not isinstance(domain, FinSet):
        domain = FinSet(domain)
    if not isinstance(codomain, FinSet):
        codomain = FinSet(codomain)
    return FinMap(domain, codomain, np.full(domain.size, value, dtype=np.int64))


def compose(f, g):
    """Diagrammatic composite ``e -> g(f(e))``."""
    if f.codomain != g.domain:
        raise DomainMismatch(
            f"cannot compose {f.domain.size}->{f.codomain.size} "
            f"with {g.domain.size}->{g.codomain.size}"
        )
    return FinMap(f.domain, g.codomain, g.targets[f.targets])


@dataclass(frozen=True, eq=False)
class FiberIndex:
    """Domain elements of ``map`` grouped by target (CSR layout).

    The fiber over ``c`` is ``members[offsets[c]:offsets[c+1]]``, listed in
    increasing domain order.
    """

    map: FinMap
    offsets: np.ndarray
    members: np.ndarray

    def fiber(self, c):
        return self.members[self.offsets[c]:self.offsets[c + 1]]

    def __iter__(self):
        for c in range(self.map.codomain.size):
            yield c, self.fiber(c)


def build_fiber_index(f):
    counts = np.bincount(f.targets, minlength=f.codomain.size)
    offsets = np.zeros(f.codomain.size + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    # stable sort keeps each fiber in increasing domain order
    members = np.argsort(f.targets, kind="stable").astype(np.int64)
    return FiberIndex(f, _frozen(offsets, np.int64), _frozen(members, np.int64))


def flatten_index(shape, multi_index):
    shape = tuple(int(n) for n in shape)
    multi_index = tuple(int(i) for i in multi_index)
    if len(shape) != len(multi_index):
        raise LengthMismatch(f"index of rank {len(multi_index)} for shape of rank {len(shape)}")
    flat = 0
    for k, (n, i) in enumerate(zip(shape, multi_index)):
        if not 0 <= i < n:
            raise OutOfRange(f"index {i} outside axis {k} of size {n}")
        flat = flat * n + i
    return flat


def unflatten_index(shape, flat):
    shape = tuple(int(n) for n in shape)
    flat = int(flat)
    if not 0 <= flat < prod(shape):
        raise OutOfRange(f"flat index {flat} outside product of size {prod(shape)}")
    out = []
    for n in reversed(shape):
        flat, i = divmod(flat, n)
        out.append(i)
    return tuple(reversed(out))


def product_coordinates(shape):
    """Row-major coordinate arrays of every element of ``prod(shape)``.

    Returns one integer array per axis, each of length ``prod(shape)``.
    """
    shape = tuple(int(n) for n in shape)
    flat = np.arange(prod(shape), dtype=np.int64)
    if not shape:
        return ()
    return tuple(np.asarray(c, dtype=np.int64) for c in np.unravel_index(flat, shape))


def ravel_coordinates(coords, shape):
    """Vectorised :func:`flatten_index` over coordinate arrays."""
    shape = tuple(int(n) for n in shape)
    flat = np.zeros(len(coords[0]) if coords else 1, dtype=np.int64)
    for c, n in zip(coords, shape):
        c = np.asarray(c, dtype=np.int64)
        if c.size and (c.min() < 0 or c.max() >= n):
            raise OutOfRange(f"coordinate outside axis of size {n}")
        flat = flat * n + c
    return flat
