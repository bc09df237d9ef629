"""Command line front end: simulate, dim, cover, mistakes, reproduce-figure1, verify-bounds.

Output paths default into the directory named by the OLREG_OUT environment
variable (current directory when unset).  Exit code is 0 only when the
requested operation completed, and for verify-bounds only when every
criterion passed; config errors name the offending field and exit 2.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import harness, verify
from .complexity import covering_number_linf, fat_shattering_dimension
from .core import InvalidInputError
from .streams import read_stream_csv


def _outdir() -> str:
    return os.environ.get("OLREG_OUT", ".")


def _resolve_out(path: str | None, default_name: str) -> str:
    if path is None:
        return os.path.join(_outdir(), default_name)
    return path


def _load_json_arg(text: str) -> dict:
    """A JSON object given inline or as a path to a JSON file."""
    if os.path.exists(text):
        with open(text) as fh:
            return json.load(fh)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"not valid JSON and not a file: {text!r} ({exc})")


def _read_points(path: str) -> np.ndarray:
    """Points from a stream CSV (label column optional)."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    if header and header[-1] == "y":
        x, _ = read_stream_csv(path)
        return x
    cols = [i for i, name in enumerate(header) if name.startswith("x_")]
    if not cols:
        raise InvalidInputError(f"{path}: no x_* columns in header {header}")
    data = np.loadtxt(path, delimiter=",", skiprows=1, usecols=cols, ndmin=2)
    return data


def cmd_simulate(args) -> int:
    cfg = harness.ExperimentConfig.from_json(args.config)
    if args.seed is not None:
        cfg.master_seed = args.seed
    result = harness.run_experiment(cfg)
    out = _resolve_out(args.out, "result.csv")
    harness.write_result_csv(result, out, per_rep=args.per_rep)
    sidecar = args.sidecar or os.path.splitext(out)[0] + ".json"
    harness.write_sidecar(result, sidecar)
    print(f"wrote {out} and {sidecar}")
    print(f"final mean regret: {result.mean_regret[-1]:.4f}")
    return 0


def cmd_dim(args) -> int:
    fc = harness.build_class(_load_json_arg(args.class_spec))
    points = _read_points(args.points)
    result = fat_shattering_dimension(fc, points, args.alpha, max_m=args.max_m)
    qualifier = "exact" if result.exact else "lower bound"
    print(f"fat-shattering dimension at alpha={args.alpha:g}: {result.dimension} ({qualifier})")
    if result.certificate is not None:
        cert = result.certificate
        print("certificate:")
        print("  idx  point" + " " * 24 + "witness")
        for idx, point, w in zip(cert.point_indices, cert.points, cert.witness):
            coords = ", ".join(f"{v:.6g}" for v in point)
            print(f"  {idx:>3}  ({coords:<26})  {w:.6g}")
    cover = covering_number_linf(fc, points, args.alpha)
    cover_kind = "exact" if cover.exact else "greedy upper bound"
    print(f"covering number at alpha={args.alpha:g} on these points: {cover.size} ({cover_kind})")
    return 0


def cmd_cover(args) -> int:
    fc = harness.build_class(_load_json_arg(args.class_spec))
    points = _read_points(args.sequence)
    method = "exact" if args.exact else "auto"
    result = covering_number_linf(fc, points, args.alpha, method=method)
    kind = "exact minimum" if result.exact else "greedy upper bound"
    print(f"cover size {result.size} at alpha={args.alpha:g} ({kind}, {points.shape[0]} rounds)")
    return 0


def cmd_mistakes(args) -> int:
    from .predictors import mistake_metrics

    spec = _load_json_arg(args.predictor)
    mode = spec.pop("mode", "zero-one")
    epsilon = spec.pop("epsilon", None)
    seed = spec.pop("seed", None)
    x, _ = read_stream_csv(args.stream)
    predictor = harness.build_predictor(spec, x, seed, mode, epsilon)
    log = mistake_metrics(predictor, x, eps_grid=args.eps)
    print(f"zero-one mistakes: {log.zero_one_count}")
    for eps, count in sorted(log.eps_ball_counts.items()):
        print(f"eps-ball misses at eps={eps:g}: {count}")
    return 0


def cmd_reproduce_figure1(args) -> int:
    outdir = _resolve_out(args.out, "figure1")
    summary = harness.reproduce_figure(
        outdir, horizon=args.horizon, repetitions=args.repetitions, master_seed=args.seed
    )
    final = summary["final_mean_cum_loss"]
    print(f"wrote restricted.csv, full.csv, summary.json under {outdir}")
    print(f"final mean cumulative loss: restricted {final['restricted']:.2f}, full {final['full']:.2f}")
    return 0


def cmd_verify_bounds(args) -> int:
    names = None if args.suite in (None, ["all"]) else args.suite
    results = verify.run_suite(names)
    for result in results:
        print(result.line(), flush=True)
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="olreg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one experiment config, write CSV + JSON sidecar")
    p.add_argument("--config", required=True, help="JSON experiment config")
    p.add_argument("--out", default=None, help="output CSV path")
    p.add_argument("--sidecar", default=None, help="sidecar JSON path (default: out with .json)")
    p.add_argument("--seed", type=int, default=None, help="override master_seed")
    p.add_argument("--per-rep", action="store_true", help="append per-repetition regret columns")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("dim", help="fat-shattering dimension of a class on candidate points")
    p.add_argument("--class", dest="class_spec", required=True, help="class spec JSON (inline or file)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--points", required=True, help="CSV of candidate points")
    p.add_argument("--max-m", type=int, default=12)
    p.set_defaults(fn=cmd_dim)

    p = sub.add_parser("cover", help="l-infinity covering number of class traces on a sequence")
    p.add_argument("--class", dest="class_spec", required=True, help="class spec JSON (inline or file)")
    p.add_argument("--sequence", required=True, help="CSV of the example sequence")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--exact", action="store_true", help="force the exact branch-and-bound search")
    p.set_defaults(fn=cmd_cover)

    p = sub.add_parser("mistakes", help="count predictor mistakes along a stream, both metrics")
    p.add_argument("--predictor", required=True, help="predictor spec JSON (inline or file)")
    p.add_argument("--stream", required=True, help="stream CSV")
    p.add_argument("--eps", type=float, nargs="*", default=[], help="eps thresholds to count")
    p.set_defaults(fn=cmd_mistakes)

    p = sub.add_parser("reproduce-figure1", help="restricted vs full net on the sparse-system stream")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--horizon", type=int, default=1000)
    p.add_argument("--repetitions", type=int, default=10)
    p.add_argument("--seed", type=int, default=2024)
    p.set_defaults(fn=cmd_reproduce_figure1)

    p = sub.add_parser("verify-bounds", help="run acceptance suites, one pass/fail line each")
    p.add_argument("--suite", nargs="*", default=None, help="suite names (default: all)")
    p.set_defaults(fn=cmd_verify_bounds)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (InvalidInputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
