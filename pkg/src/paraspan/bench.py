"""Wall-clock comparison of the naive and indexed contraction paths."""

import statistics
import time

import numpy as np

from . import _kernels
from .integration import FunVec, MeasVec
from .span import backward_input, backward_weights, compile, forward

OPS = ("forward", "backward_input", "backward_weights")


def median_ns(fn, repeat):
    samples = []
    for _ in range(max(1, repeat)):
        start = time.perf_counter_ns()
        fn()
        samples.append(time.perf_counter_ns() - start)
    return statistics.median(samples)


def time_operators(span, mu=None, repeat=20, seed=0):
    """Median timings as ``[(op, path, median_ns), ...]``, six rows.

    Compilation and JIT warm-up happen before any timing.
    """
    rng = np.random.default_rng(seed)
    x = FunVec(span.input_space, rng.uniform(-1, 1, span.input_space.size))
    y = FunVec(span.output_space, rng.uniform(-1, 1, span.output_space.size))
    w = FunVec(span.weight_space, rng.uniform(-1, 1, span.weight_space.size))
    if mu is None:
        mu = MeasVec.counting(span.apex)
    _kernels.warmup()
    indexed = compile(span)
    calls = {
        ("forward", "naive"): lambda: forward(span, x, w, mu),
        ("forward", "indexed"): lambda: indexed.forward(x, w, mu),
        ("backward_input", "naive"): lambda: backward_input(span, y, w, mu),
        ("backward_input", "indexed"): lambda: indexed.backward_input(y, w, mu),
        ("backward_weights", "naive"): lambda: backward_weights(span, x, y, mu),
        ("backward_weights", "indexed"): lambda: indexed.backward_weights(x, y, mu),
    }
    for fn in calls.values():
        fn()
    return [(op, path, median_ns(fn, repeat)) for (op, path), fn in calls.items()]
