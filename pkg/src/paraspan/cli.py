"""Command-line interface.

Exit codes: 0 success, 1 a check failed, 2 usage / I/O / parse error,
3 invariant violation or space mismatch.  Reports go to stdout as
TAB-separated lines, diagnostics to stderr.
"""

import argparse
import json
import sys

from .bench import time_operators
from .errors import SpanError
from .integration import FunVec, MeasVec
from .io import FileFormatError, dumps, encode_span, encode_tensor, load_span, load_tensor
from .oracles import GRAD_STEP, GRAD_TOL, run_axiom_suite, run_gradcheck
from .span import backward_input, backward_measure, backward_weights, forward

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_INVARIANT = 0, 1, 2, 3


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _non_negative_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not value >= 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _positive_float(text):
    value = _non_negative_float(text)
    if value == 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return value


def _write(path, doc):
    try:
        with open(path, "w") as fh:
            fh.write(dumps(doc))
    except OSError as exc:
        raise FileFormatError(f"{path}: {exc.strerror}") from exc


def cmd_make(args):
    span, mu, info = load_span(args.spec)
    _write(args.out, encode_span(span, mu if info["explicit_density"] else None))
    for key, value in span.sizes().items():
        print(f"{key}\t{value}")
    if "S_o" in info:
        print(f"S_o\t{json.dumps(info['S_o'])}")
    return EXIT_OK


def _mu(args, span, default):
    if args.mu is None:
        return default
    return load_tensor(args.mu, MeasVec)


def cmd_forward(args):
    span, default_mu, _ = load_span(args.span)
    x = load_tensor(args.x, FunVec)
    w = load_tensor(args.w, FunVec)
    mu = _mu(args, span, default_mu)
    _write(args.out, encode_tensor(forward(span, x, w, mu)))
    return EXIT_OK


_BACKWARD_NEEDS = {
    "input": ("y", "w"),
    "weights": ("x", "y"),
    "measure": ("x", "y", "w"),
}


def cmd_backward(args, parser):
    missing = [f"--{n}" for n in _BACKWARD_NEEDS[args.wrt] if getattr(args, n) is None]
    if missing:
        parser.error(f"--wrt {args.wrt} requires {', '.join(missing)}")
    span, default_mu, _ = load_span(args.span)
    vecs = {n: load_tensor(getattr(args, n), FunVec) for n in _BACKWARD_NEEDS[args.wrt]}
    if args.wrt == "input":
        out = backward_input(span, vecs["y"], vecs["w"], _mu(args, span, default_mu))
    elif args.wrt == "weights":
        out = backward_weights(span, vecs["x"], vecs["y"], _mu(args, span, default_mu))
    else:
        out = backward_measure(span, vecs["x"], vecs["y"], vecs["w"])
    _write(args.out, encode_tensor(out))
    return EXIT_OK


def _print_reports(reports):
    for report in reports:
        print(report.to_line())
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def cmd_check(args):
    return _print_reports(run_axiom_suite(args.seed, args.trials, args.max_size, args.max_apex))


def cmd_gradcheck(args):
    span, _, _ = load_span(args.span)
    return _print_reports(
        run_gradcheck(span, seed=args.seed, trials=args.trials, h=args.h, tol=args.tol)
    )


def cmd_bench(args):
    span, mu, _ = load_span(args.span)
    for op, path, ns in time_operators(span, mu, repeat=args.repeat):
        print(f"{op}\t{path}\t{int(round(ns))}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="paraspan",
        description="Linear layers as parametric spans: build, evaluate, differentiate, verify.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("make", help="elaborate a span spec into a raw span file")
    p.add_argument("spec")
    p.add_argument("--out", required=True)

    p = sub.add_parser("forward", help="evaluate the layer on an input and weights")
    p.add_argument("span")
    p.add_argument("--x", required=True, help="input function (values)")
    p.add_argument("--w", required=True, help="weight function (values)")
    p.add_argument("--mu", help="edge measure (density); default: span density or all-ones")
    p.add_argument("--out", required=True)

    p = sub.add_parser("backward", help="reverse-mode rule for input, weights or measure")
    p.add_argument("span")
    p.add_argument("--wrt", choices=sorted(_BACKWARD_NEEDS), default="input")
    p.add_argument("--x")
    p.add_argument("--y", help="output cotangent (values)")
    p.add_argument("--w")
    p.add_argument("--mu")
    p.add_argument("--out", required=True)

    p = sub.add_parser("check", help="run the axiom property suite")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--trials", type=_positive_int, default=100)
    p.add_argument("--max-size", type=_positive_int, default=32)
    p.add_argument("--max-apex", type=_positive_int, default=1000)

    p = sub.add_parser("gradcheck", help="compare reverse-mode rules to finite differences")
    p.add_argument("span")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=_positive_int, default=10)
    p.add_argument("--h", type=_positive_float, default=GRAD_STEP)
    p.add_argument("--tol", type=_non_negative_float, default=GRAD_TOL)

    p = sub.add_parser("bench", help="time naive vs indexed contraction")
    p.add_argument("span")
    p.add_argument("--repeat", type=_positive_int, default=20)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        if args.command == "backward":
            try:
                return cmd_backward(args, parser)
            except SystemExit as exc:
                return exc.code
        return {
            "make": cmd_make,
            "forward": cmd_forward,
            "check": cmd_check,
            "gradcheck": cmd_gradcheck,
            "bench": cmd_bench,
        }[args.command](args)
    except FileFormatError as exc:
        print(f"paraspan {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SpanError as exc:
        print(f"paraspan {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
