"""How does restart-learner regret grow with the horizon?

Sweeps T over a doubling grid, runs the forecast-driven restart learner on a
slowly decaying linear-system stream with fair-coin labels (every hypothesis
then suffers mean loss 1/2, so regret isolates the aggregation cost), and
fits a log-log slope.  Writes one CSV row per horizon.

    python scripts/scaling_study.py --seeds 50 --out scaling.csv
"""

import argparse
import csv

import numpy as np

from olreg.core import ExampleSequence, LossSpec, run_online
from olreg.augmented import RestartOnMissLearner
from olreg.hypotheses import bounded_variation_class
from olreg.predictors import lds_predictor
from olreg.streams import iterate_linear_system
from olreg.transductive import TransductiveLearner


def mean_final_regret(horizon, n_seeds, decay, spec):
    fc = bounded_variation_class(1.0, 2)
    x = iterate_linear_system(np.array([[decay]]), np.array([1.0]), horizon)

    def factory(suffix, seed):
        return TransductiveLearner.from_class(fc, suffix, 0.0, spec, seed)

    finals = np.empty(n_seeds)
    for s in range(n_seeds):
        rng = np.random.default_rng(40_000 + s)
        y = rng.integers(0, 2, size=horizon).astype(np.float64)
        learner = RestartOnMissLearner(
            lds_predictor(horizon, 1, identification_rounds=1), factory, horizon, seed=41_000 + s
        )
        realized = run_online(learner, ExampleSequence(x, y), spec)
        best = np.abs(fc.trace_matrix(x) - y[None, :]).sum(axis=1).min()
        finals[s] = realized.sum() - best
    return finals.mean(), finals.std(ddof=1) / np.sqrt(n_seeds)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--horizons", type=int, nargs="*", default=[125, 250, 500, 1000, 2000])
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--decay", type=float, default=0.996)
    ap.add_argument("--out", default="scaling.csv")
    args = ap.parse_args()

    spec = LossSpec("l1", 1.0, 1.0)
    rows = []
    for T in args.horizons:
        mean, se = mean_final_regret(T, args.seeds, args.decay, spec)
        rows.append((T, mean, se))
        print(f"T={T:5d}  mean final regret {mean:8.3f}  (se {se:.3f})")

    slope = np.polyfit(np.log([r[0] for r in rows]), np.log([r[1] for r in rows]), 1)[0]
    print(f"log-log slope: {slope:.3f}  (sqrt scaling would be 0.5)")

    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["horizon", "mean_final_regret", "stderr"])
        writer.writerows(rows)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
