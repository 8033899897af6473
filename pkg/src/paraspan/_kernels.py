import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def fiber_contract(offsets, members, gather_a, a, gather_b, b, mu, out):
    # Sequential per-fiber sum, same order and same product grouping as the
    # bincount path, so results agree bitwise. No fastmath: no reassociation.
    for c in range(offsets.shape[0] - 1):
        acc = 0.0
        for j in range(offsets[c], offsets[c + 1]):
            acc += (a[gather_a[j]] * b[gather_b[j]]) * mu[members[j]]
        out[c] = acc
    return out


def warmup():
    z = np.zeros(1, dtype=np.int64)
    o = np.array([0, 1], dtype=np.int64)
    v = np.ones(1)
    fiber_contract(o, z, z, v, z, v, v, np.empty(1))
