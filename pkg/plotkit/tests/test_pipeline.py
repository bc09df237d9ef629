"""End-to-end run against real simulator output, one test per criterion.

The simulator is driven through its CLI only; the CSV schema is the entire
contract between the two packages.
"""

import csv
import json
import subprocess
import sys

import numpy as np

from plotkit import PlotJob, render

HORIZONS = (125, 250, 500, 1000, 2000)


def _olreg(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "olreg.cli", *args], capture_output=True, text=True
    )
    assert proc.returncode == 0, proc.stderr
    return proc


def _coin_label_run(outdir, horizon, seed):
    """Simulate hedge over the two constant experts on fair-coin labels.

    Every expert then has mean loss 1/2, so the final regret is pure
    aggregation cost, which grows like sqrt(T).
    """
    rng = np.random.default_rng(seed)
    stream = outdir / f"stream_{horizon}.csv"
    with open(stream, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "x_1", "y"])
        for t in range(horizon):
            writer.writerow([t + 1, repr(float(rng.random())), repr(float(rng.integers(0, 2)))])
    config = {
        "horizon": horizon,
        "repetitions": 1,
        "master_seed": 7,
        "stream": {"kind": "csv", "path": str(stream)},
        "class": {"kind": "constants", "values": [0.0, 1.0]},
        "target": {"kind": "csv-labels"},
        "loss": {"kind": "l1", "normalization_bound": 1.0},
        "learner": {"kind": "mwa", "mode": "averaged"},
    }
    config_path = outdir / f"config_{horizon}.json"
    config_path.write_text(json.dumps(config))
    result = outdir / f"result_{horizon}.csv"
    _olreg("simulate", "--config", str(config_path), "--out", str(result))
    return str(result)


def test_13_figure_csvs_render_and_slope_matches(tmp_path):
    figdir = tmp_path / "figure1"
    _olreg("reproduce-figure1", "--out", str(figdir))
    two_curves = tmp_path / "figure1.png"
    info = render(
        PlotJob(
            (str(figdir / "restricted.csv"), str(figdir / "full.csv")),
            ("restricted net", "full net"),
            str(two_curves),
            "loss-curves",
        )
    )
    assert two_curves.read_bytes()[:4] == b"\x89PNG"
    assert info["slope"] is None

    results = tuple(_coin_label_run(tmp_path, T, 500 + T) for T in HORIZONS)
    scaling = tmp_path / "scaling.png"
    info = render(PlotJob(results, None, str(scaling), "scaling-loglog"))
    assert scaling.exists()

    # independent fit straight from the CSVs, without plotkit's reader
    points = []
    for path in results:
        rows = list(csv.DictReader(open(path)))
        points.append((float(rows[-1]["t"]), float(rows[-1]["mean_regret"])))
    ln_t = np.log([p[0] for p in points])
    ln_r = np.log([p[1] for p in points])
    independent = float(np.polyfit(ln_t, ln_r, 1)[0])

    gap = abs(info["slope"] - independent)
    assert gap <= 1e-9
    assert 0.40 <= info["slope"] <= 0.65
    print(
        f"[PASS] 13 plot-rendering: two-curve figure ok, "
        f"slope {info['slope']:.3f} matches closed form (|diff| {gap:.1e})"
    )
