"""Exit criteria, one test per criterion, each at its stated tolerance.

Run ``pytest tests/test_acceptance.py`` to get the PASS/FAIL summary block.
"""

import itertools
import json
import time

import numpy as np
import pytest

from paraspan import (
    ConvSpec,
    FinMap,
    FinSet,
    FunVec,
    GraphSpec,
    MeasVec,
    ParametricSpan,
    backward_input,
    backward_weights,
    compile,
    conv_span,
    dense_span,
    forward,
    graph_span,
    pair,
    permute_legs,
)
from paraspan.bench import time_operators
from paraspan.cli import main
from paraspan.oracles import (
    conv_oracle,
    graph_oracle,
    matmul_oracle,
    pairing_oracle,
    random_span,
    rel_error,
    run_axiom_suite,
    run_gradcheck,
    transposed_matmul_oracle,
    trial_rng,
)
from paraspan.span import ROLE_ASSIGNMENTS, derived_operator

ADJOINT_INSTANCES = 1000
CONV_INSTANCES = 200


def _record(request, **values):
    for key, value in values.items():
        request.node.user_properties.append((key, value))


def _inputs(rng, span, integer=False):
    def draw(n):
        if integer:
            return rng.integers(-5, 6, n).astype(float)
        return rng.uniform(-1, 1, n)

    return (
        FunVec(span.input_space, draw(span.input_space.size)),
        FunVec(span.output_space, draw(span.output_space.size)),
        FunVec(span.weight_space, draw(span.weight_space.size)),
        MeasVec(span.apex, draw(span.apex.size)),
    )


def adjoint_instances():
    for trial in range(ADJOINT_INSTANCES):
        rng = trial_rng(2024, 2, trial)
        span = random_span(rng, 64, 1000)
        yield (span, *_inputs(rng, span))


def random_conv_spec(rng):
    rank = int(rng.integers(1, 3))
    while True:
        S = tuple(int(v) for v in rng.integers(1, 13, rank))
        F = tuple(int(v) for v in rng.integers(1, 4, rank))
        st = tuple(int(v) for v in rng.integers(1, 4, rank))
        d = tuple(int(v) for v in rng.integers(1, 4, rank))
        if all(dk * (fk - 1) + 1 <= sk for sk, fk, dk in zip(S, F, d)):
            n_i, n_o = (int(v) for v in rng.integers(1, 4, 2))
            return ConvSpec(n_i, n_o, S, F, st, d)


def conv_instances():
    worked = ConvSpec(1, 1, (5,), (3,), (1,), (1,))
    yield worked, np.array([1.0, 2.0, 3.0, 4.0, 5.0]), np.array([1.0, 0.0, 0.0])
    for trial in range(CONV_INSTANCES):
        rng = trial_rng(2024, 5, trial)
        spec = random_conv_spec(rng)
        n_x = spec.in_channels * int(np.prod(spec.input_shape))
        n_w = spec.in_channels * spec.out_channels * int(np.prod(spec.filter_shape))
        yield spec, rng.uniform(-1, 1, n_x), rng.uniform(-1, 1, n_w)


@pytest.mark.criterion(1, "Axiom suite: Frobenius reciprocity, integral naturality, extranaturality")
def test_criterion_1_axioms(request):
    start = time.perf_counter()
    reports = run_axiom_suite(seed=42, trials=1000, max_size=64)
    elapsed = time.perf_counter() - start
    laws = [r for r in reports if r.name.split("_int")[0] in
            ("frobenius_reciprocity", "integral_naturality", "extranaturality")]
    assert len(laws) == 6
    for r in laws:
        assert r.trials >= 1000
        if r.name.endswith("_int"):
            assert r.max_abs_error == 0.0, r.to_line()
        else:
            assert r.max_rel_error <= 1e-12, r.to_line()
    _record(request, max_rel=max(r.max_rel_error for r in laws), seconds=round(elapsed, 2))
    assert elapsed < 5.0


@pytest.mark.criterion(2, "Adjoint identity on 1000 random spans, |E| <= 1000, rel 1e-9")
def test_criterion_2_adjoint(request):
    start = time.perf_counter()
    worst = 0.0
    count = 0
    for span, x, y, w, mu in adjoint_instances():
        out_side = pair(y, forward(span, x, w, mu))
        in_side = pair(x, backward_input(span, y, w, mu))
        brute = pairing_oracle(span, x, y, w, mu)
        worst = max(worst, rel_error(out_side, in_side)[1], rel_error(out_side, brute)[1])
        count += 1
    elapsed = time.perf_counter() - start
    _record(request, instances=count, max_rel=worst, seconds=round(elapsed, 2))
    assert count >= 1000
    assert worst <= 1e-9
    assert elapsed < 10.0


@pytest.mark.criterion(3, "Leg-permutation coherence, 6 assignments x 100 spans, exact")
def test_criterion_3_coherence(request):
    mismatches = 0
    for trial in range(100):
        rng = trial_rng(2024, 3, trial)
        span = random_span(rng, 64, 1000)
        for assignment in ROLE_ASSIGNMENTS:
            permuted = permute_legs(span, assignment)
            a = FunVec(permuted.input_space, rng.uniform(-1, 1, permuted.input_space.size))
            b = FunVec(permuted.weight_space, rng.uniform(-1, 1, permuted.weight_space.size))
            mu = MeasVec(span.apex, rng.uniform(-1, 1, span.apex.size))
            got = forward(permuted, a, b, mu)
            want = derived_operator(span, assignment)(a, b, mu)
            if got.density.tobytes() != want.density.tobytes():
                mismatches += 1
    _record(request, mismatches=mismatches)
    assert mismatches == 0


@pytest.mark.criterion(4, "Dense layer equals matmul oracles (exact on ints, 1e-12 on floats)")
def test_criterion_4_dense(request):
    rng = np.random.default_rng(4)
    for n_i, n_o in itertools.product(range(1, 9), repeat=2):
        span = dense_span(n_i, n_o)
        mu = MeasVec.counting(span.apex)
        x = rng.integers(-5, 6, n_i).astype(float)
        y = rng.integers(-5, 6, n_o).astype(float)
        W = rng.integers(-5, 6, (n_i, n_o)).astype(float)
        w = FunVec(span.weight_space, W.reshape(-1))
        assert forward(span, FunVec(n_i, x), w, mu).tolist() == matmul_oracle(x, W.tolist())
        assert backward_input(span, FunVec(n_o, y), w, mu).tolist() == \
            transposed_matmul_oracle(y, W.tolist())
    worst = 0.0
    for _ in range(100):
        n_i, n_o = (int(v) for v in rng.integers(1, 9, 2))
        span = dense_span(n_i, n_o)
        mu = MeasVec.counting(span.apex)
        x, y, W = rng.uniform(-1, 1, n_i), rng.uniform(-1, 1, n_o), rng.uniform(-1, 1, (n_i, n_o))
        w = FunVec(span.weight_space, W.reshape(-1))
        worst = max(
            worst,
            rel_error(forward(span, FunVec(n_i, x), w, mu).density, matmul_oracle(x, W.tolist()))[1],
            rel_error(backward_input(span, FunVec(n_o, y), w, mu).density,
                      transposed_matmul_oracle(y, W.tolist()))[1],
        )
    _record(request, max_rel=worst)
    assert worst <= 1e-12


@pytest.mark.criterion(5, "Convolution equals direct cross-correlation on 200 specs, 1e-12")
def test_criterion_5_conv(request):
    worst = 0.0
    count = 0
    for spec, x, w in conv_instances():
        span = conv_span(spec)
        got = forward(span, FunVec(span.input_space, x), FunVec(span.weight_space, w),
                      MeasVec.counting(span.apex)).density
        want = conv_oracle(x, spec, w).reshape(-1)
        if count == 0:
            assert got.tolist() == want.tolist() == [1.0, 2.0, 3.0]
        worst = max(worst, rel_error(got, want)[1])
        count += 1
    _record(request, specs=count - 1, max_rel=worst)
    assert count - 1 >= 200
    assert worst <= 1e-12


def _gradcheck_conv(rng):
    return conv_span(random_conv_spec(rng))


def _gradcheck_dense(rng):
    return dense_span(*(int(v) for v in rng.integers(1, 9, 2)))


def _gradcheck_graph(rng):
    n = int(rng.integers(1, 51))
    m = int(rng.integers(0, 501))
    k = int(rng.integers(1, 9))
    edges = [tuple(e) for e in rng.integers(0, n, (m, 2)).tolist()]
    return graph_span(GraphSpec(n, edges, rng.integers(0, k, m).tolist(), k))[0]


@pytest.mark.criterion(6, "Gradients match central differences (h=1e-5, rel 1e-6), 100 x dense/conv/graph")
def test_criterion_6_gradcheck(request):
    start = time.perf_counter()
    worst = {}
    for family, make in (("dense", _gradcheck_dense), ("conv", _gradcheck_conv), ("graph", _gradcheck_graph)):
        reports = run_gradcheck(make, seed=6, trials=100, h=1e-5, tol=1e-6, prefix=family)
        for r in reports:
            assert r.trials >= 100
            assert r.passed, r.to_line()
        worst[family] = max(r.max_rel_error for r in reports)
    elapsed = time.perf_counter() - start
    _record(request, **{f"max_rel_{k}": v for k, v in worst.items()}, seconds=round(elapsed, 1))
    assert elapsed < 30.0


@pytest.mark.criterion(7, "Graph layer: path-graph identities exact, random graphs vs edge loop 1e-12")
def test_criterion_7_graph(request):
    edges = [(0, 0), (1, 1), (2, 2), (0, 1), (1, 0), (1, 2), (2, 1)]
    span, mu = graph_span(GraphSpec(3, edges, [0, 0, 0, 1, 1, 1, 1], 2))
    x = FunVec(3, [1, 2, 3])
    assert forward(span, x, FunVec(2, [1, 0]), mu).tolist() == [1.0, 2.0, 3.0]
    assert forward(span, x, FunVec(2, [0, 1]), mu).tolist() == [2.0, 4.0, 2.0]
    worst = 0.0
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(1, 51))
        m = int(rng.integers(0, 501))
        k = int(rng.integers(1, 9))
        edge_list = [tuple(e) for e in rng.integers(0, n, (m, 2)).tolist()]
        bins = rng.integers(0, k, m).tolist()
        density = rng.uniform(0, 2, m).tolist()
        span, mu = graph_span(GraphSpec(n, edge_list, bins, k, density))
        xv, wv = rng.uniform(-1, 1, n), rng.uniform(-1, 1, k)
        got = forward(span, FunVec(n, xv), FunVec(k, wv), mu).density
        worst = max(worst, rel_error(got, graph_oracle(n, edge_list, bins, density, xv, wv))[1])
    _record(request, max_rel=worst)
    assert worst <= 1e-12


def _same_bits(a, b):
    return a.density.tobytes() == b.density.tobytes()


def _random_big_span(rng, size):
    apex = FinSet(size)
    legs = [FinMap(apex, FinSet(size), rng.integers(0, size, size)) for _ in range(3)]
    return ParametricSpan(apex, *legs)


@pytest.mark.criterion(8, "Indexed path bitwise equal to naive; indexed forward not slower at |E|=1e5")
def test_criterion_8_indexed(request):
    checked = 0
    for span, x, y, w, mu in adjoint_instances():
        indexed = compile(span)
        assert _same_bits(indexed.forward(x, w, mu), forward(span, x, w, mu))
        assert _same_bits(indexed.backward_input(y, w, mu), backward_input(span, y, w, mu))
        assert _same_bits(indexed.backward_weights(x, y, mu), backward_weights(span, x, y, mu))
        checked += 1
    rng = np.random.default_rng(8)
    for spec, xv, wv in conv_instances():
        span = conv_span(spec)
        indexed = compile(span)
        x, w = FunVec(span.input_space, xv), FunVec(span.weight_space, wv)
        y = FunVec(span.output_space, rng.uniform(-1, 1, span.output_space.size))
        mu = MeasVec.counting(span.apex)
        assert _same_bits(indexed.forward(x, w, mu), forward(span, x, w, mu))
        assert _same_bits(indexed.backward_input(y, w, mu), backward_input(span, y, w, mu))
        assert _same_bits(indexed.backward_weights(x, y, mu), backward_weights(span, x, y, mu))
        checked += 1

    timings = {(op, path): ns for op, path, ns in
               time_operators(_random_big_span(rng, 10**5), repeat=30)}
    naive, fast = timings[("forward", "naive")], timings[("forward", "indexed")]
    _record(request, instances=checked, naive_ms=round(naive / 1e6, 3), indexed_ms=round(fast / 1e6, 3))
    assert fast <= naive


@pytest.mark.criterion(9, "Backward within 3x of forward on dense and conv spans with |E| >= 1e5")
def test_criterion_9_comparable_cost(request):
    spans = {
        "dense": dense_span(400, 250),
        "conv": conv_span(ConvSpec(4, 8, (32, 32), (3, 3), (1, 1), (1, 1))),
    }
    ratios = {}
    for name, span in spans.items():
        assert span.apex.size >= 10**5
        timings = {(op, path): ns for op, path, ns in time_operators(span, repeat=25)}
        for path in ("naive", "indexed"):
            fwd = timings[("forward", path)]
            for op in ("backward_input", "backward_weights"):
                ratios[f"{name}/{path}/{op}"] = timings[(op, path)] / fwd
    _record(request, max_ratio=round(max(ratios.values()), 2))
    assert all(r <= 3.0 for r in ratios.values()), ratios


@pytest.mark.criterion(10, "CLI: check and gradcheck exit 0 with defaults; make round-trips raw files")
def test_criterion_10_cli(request, tmp_path, capsys):
    assert main(["check"]) == 0
    dense = tmp_path / "dense.json"
    dense.write_text(json.dumps({"kind": "dense", "n_i": 4, "n_o": 3}))
    conv = tmp_path / "conv.json"
    conv.write_text(json.dumps({"kind": "conv", "n_i": 2, "n_o": 3, "S_i": [7, 6], "F": [3, 2],
                                "stride": [2, 1], "dilation": [1, 2]}))
    assert main(["gradcheck", str(dense)]) == 0
    assert main(["gradcheck", str(conv)]) == 0

    rng = np.random.default_rng(10)
    raw = {"kind": "raw", "E": 300, "X": 17, "Y": 9, "W": 5,
           "s": rng.integers(0, 17, 300).tolist(), "t": rng.integers(0, 9, 300).tolist(),
           "pi": rng.integers(0, 5, 300).tolist()}
    src = tmp_path / "raw.json"
    src.write_text(json.dumps(raw))
    first, second = tmp_path / "first.json", tmp_path / "second.json"
    assert main(["make", str(src), "--out", str(first)]) == 0
    assert main(["make", str(first), "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    for spec in (dense, conv):
        out_a, out_b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["make", str(spec), "--out", str(out_a)]) == 0
        assert main(["make", str(out_a), "--out", str(out_b)]) == 0
        assert out_a.read_bytes() == out_b.read_bytes()
    capsys.readouterr()
    _record(request, roundtrip="byte-identical")
