"""Command line front end: ``plot --kind <k> --in a.csv b.csv --out fig.png``."""

import argparse
import sys

from .render import PLOT_KINDS, PlotInputError, PlotJob, render


def build_parser():
    parser = argparse.ArgumentParser(
        prog="plot",
        description="render simulator result CSVs as loss-curve or scaling figures",
    )
    parser.add_argument("--kind", required=True, choices=PLOT_KINDS)
    parser.add_argument(
        "--in", dest="inputs", nargs="+", required=True, metavar="CSV",
        help="result CSVs, one curve (or one scaling point) each",
    )
    parser.add_argument(
        "--labels", nargs="*", default=None,
        help="curve labels, one per input (default: file stems)",
    )
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument(
        "--vector", action="store_true", help="write SVG instead of the default PNG"
    )
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        job = PlotJob(
            inputs=tuple(args.inputs),
            labels=None if args.labels is None else tuple(args.labels),
            out=args.out,
            kind=args.kind,
            vector=args.vector,
        )
        info = render(job)
    except (PlotInputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if info["slope"] is not None:
        print(f"fitted slope {info['slope']:.6f}")
    print(f"wrote {info['out']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
