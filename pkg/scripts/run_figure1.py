"""Restricted-net vs full-net aggregation on the sparse linear system stream.

Runs both experiments, writes restricted.csv / full.csv / summary.json into
the output directory, and prints the loss gap at a few checkpoints.  Same
engine as `olreg reproduce-figure1`, kept here as a hackable starting point.

    python scripts/run_figure1.py --out figure1 --repetitions 10
"""

import argparse
import json

from olreg.harness import reproduce_figure


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="figure1")
    ap.add_argument("--horizon", type=int, default=1000)
    ap.add_argument("--repetitions", type=int, default=10)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()

    summary = reproduce_figure(
        args.out, horizon=args.horizon, repetitions=args.repetitions, master_seed=args.seed
    )
    print(json.dumps(summary, indent=2, sort_keys=True))
    final = summary["final_mean_cum_loss"]
    verdict = "restricted wins" if final["restricted"] < final["full"] else "full wins (!)"
    print(f"\nfinal mean cumulative loss: restricted {final['restricted']:.2f} "
          f"vs full {final['full']:.2f} -> {verdict}")


if __name__ == "__main__":
    main()
