"""Command-line interface: ``params``, ``sketch``, ``compare`` and ``verify``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import analysis
from .errors import DkmwError
from .estimators import (
    DEFAULT_D,
    DEFAULT_K,
    DEFAULT_SHINGLE_WIDTH,
    DEFAULT_TAU,
    build_bundle,
    jaccard_estimate,
    load_bundle,
    save_bundle,
    shingle_ingest,
)
from .suites import SUITES, run_suite


def cmd_params(args) -> int:
    lemma_l, theorem_l = analysis.required_independence(args.d)
    series = analysis.delta_series_constant(args.epsilon, include_tail=True)
    c = analysis.default_c(args.epsilon) if args.c is None else args.c
    # required_k needs an even l, and 3d+2 is odd for odd d.
    k_l = theorem_l + theorem_l % 2
    lines = {
        "d": args.d,
        "epsilon": args.epsilon,
        "lemma_l": lemma_l,
        "theorem_l": theorem_l,
        "series_constant": f"{series:.10g}",
        "c": f"{c:g}",
        "required_k_l": k_l,
        "required_k": analysis.required_k(args.d, args.epsilon, c, k_l),
        "lemma_k": analysis.required_k(args.d, args.epsilon, 1, lemma_l),
        "tau": args.tau,
        "sample_budget": analysis.sample_budget(args.tau),
    }
    for key, value in lines.items():
        print(f"{key}={value}")
    return 0


def cmd_sketch(args) -> int:
    data = Path(args.input).read_bytes()
    elements = shingle_ingest(data, args.w)
    bundle = build_bundle(elements, args.k, args.tau, args.seed, d=args.d, l=args.l)
    save_bundle(bundle, args.out)
    print(f"elements={len(elements)} sketches={bundle.r} k={bundle.k} underfull={str(bundle.underfull).lower()}")
    return 0


def cmd_compare(args) -> int:
    result = jaccard_estimate(load_bundle(args.a), load_bundle(args.b))
    print(f"jaccard={result.estimate:.10g}")
    print(f"underfull={str(result.underfull).lower()}")
    for j, value in enumerate(result.per_sketch):
        print(f"sketch[{j}]={value:.10g}")
    return 0


def cmd_verify(args) -> int:
    res = run_suite(args.suite, args.seed, args.trials)
    report = res.report()
    print(report)
    if args.out_dir is not None:
        from .plotting import render_suite

        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{args.suite}.txt").write_text(report + "\n")
        render_suite(res, out / f"{args.suite}.png")
    return 0 if res.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dkminwise", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="parameter thresholds for a target epsilon")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--c", type=float, default=None, help="series constant (default: computed)")
    p.add_argument("--tau", type=float, default=DEFAULT_TAU)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("sketch", help="shingle a file and write a sketch bundle")
    p.add_argument("--input", required=True)
    p.add_argument("--w", type=int, default=DEFAULT_SHINGLE_WIDTH)
    p.add_argument("--k", type=int, default=DEFAULT_K)
    p.add_argument("--tau", type=float, default=DEFAULT_TAU)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--d", type=int, default=DEFAULT_D)
    p.add_argument("--l", type=int, default=None, help="independence degree (default 3d+2)")
    p.set_defaults(func=cmd_sketch)

    p = sub.add_parser("compare", help="Jaccard estimate between two sketch files")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", choices=SUITES, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--out-dir", default=None, help="write <suite>.txt and <suite>.png here")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DkmwError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
