"""Turn result CSVs from the simulator into comparison and scaling figures.

The input contract is the simulator's CSV schema: columns ``t``,
``mean_cum_loss``, ``mean_cum_best``, ``mean_regret``, ``stderr_regret``
(extra columns are ignored). Nothing here imports the simulator; the CSV is
the whole interface.
"""

import csv
import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

RESULT_COLUMNS = ("t", "mean_cum_loss", "mean_cum_best", "mean_regret", "stderr_regret")
PLOT_KINDS = ("loss-curves", "scaling-loglog")

# First two curves keep fixed colors so paired comparisons read the same way
# in every figure; further curves fall back to the default cycle.
CURVE_COLORS = ("tab:blue", "tab:red")
FIGSIZE = (7.0, 4.5)
SVG_HASHSALT = "plotkit"


class PlotInputError(ValueError):
    """A job or one of its CSV inputs is unusable."""


@dataclass
class PlotJob:
    """One figure to render: input CSVs, curve labels, destination, kind.

    ``labels=None`` labels each curve with its file stem. ``vector=True``
    writes SVG instead of PNG.
    """

    inputs: tuple
    labels: tuple = None
    out: str = "figure.png"
    kind: str = "loss-curves"
    vector: bool = False

    def __post_init__(self):
        self.inputs = tuple(str(p) for p in self.inputs)
        if not self.inputs:
            raise PlotInputError("no input CSVs given")
        if self.kind not in PLOT_KINDS:
            raise PlotInputError(f"unknown plot kind {self.kind!r}; known: {', '.join(PLOT_KINDS)}")
        if self.labels is None:
            self.labels = tuple(
                os.path.splitext(os.path.basename(p))[0] for p in self.inputs
            )
        else:
            self.labels = tuple(str(s) for s in self.labels)
            if len(self.labels) != len(self.inputs):
                raise PlotInputError(
                    f"{len(self.inputs)} inputs but {len(self.labels)} labels"
                )


def read_result_csv(path):
    """Parse one result CSV into a dict of float arrays, keyed by column.

    Raises PlotInputError naming the missing columns on a schema mismatch,
    or when the file has no data rows.
    """
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            fields = reader.fieldnames or []
            missing = [c for c in RESULT_COLUMNS if c not in fields]
            if missing:
                raise PlotInputError(
                    f"{path}: missing required column(s): {', '.join(missing)}"
                )
            rows = list(reader)
    except OSError as exc:
        raise PlotInputError(f"{path}: {exc.strerror or exc}") from exc
    if not rows:
        raise PlotInputError(f"{path}: no data rows")
    data = {}
    for col in RESULT_COLUMNS:
        try:
            data[col] = np.array([float(row[col]) for row in rows])
        except (TypeError, ValueError) as exc:
            raise PlotInputError(f"{path}: non-numeric value in column {col!r}") from exc
    return data


def loglog_slope(horizons, values):
    """Least-squares slope of ln(values) against ln(horizons), closed form."""
    x = np.log(np.asarray(horizons, dtype=np.float64))
    y = np.log(np.asarray(values, dtype=np.float64))
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise PlotInputError("slope fit needs at least two (horizon, value) pairs")
    xc = x - x.mean()
    denom = float(xc @ xc)
    if denom == 0.0:
        raise PlotInputError("slope fit needs at least two distinct horizons")
    return float(xc @ (y - y.mean())) / denom


def _loss_curves(ax, job):
    for i, (path, label) in enumerate(zip(job.inputs, job.labels)):
        data = read_result_csv(path)
        color = CURVE_COLORS[i] if i < len(CURVE_COLORS) else None
        (line,) = ax.plot(data["t"], data["mean_cum_loss"], label=label, color=color)
        band = data["stderr_regret"]
        ax.fill_between(
            data["t"],
            data["mean_cum_loss"] - band,
            data["mean_cum_loss"] + band,
            color=line.get_color(),
            alpha=0.2,
            linewidth=0,
        )
    ax.set_xlabel("round t")
    ax.set_ylabel("mean cumulative loss")
    ax.legend()
    return None


def _scaling_loglog(ax, job):
    if len(job.inputs) < 2:
        raise PlotInputError("scaling-loglog needs at least two input CSVs")
    horizons, finals = [], []
    for path in job.inputs:
        data = read_result_csv(path)
        final = float(data["mean_regret"][-1])
        if final <= 0.0:
            raise PlotInputError(
                f"{path}: final mean_regret is {final:g}, log-log fit needs it positive"
            )
        horizons.append(float(data["t"][-1]))
        finals.append(final)
    horizons = np.array(horizons)
    finals = np.array(finals)
    slope = loglog_slope(horizons, finals)

    order = np.argsort(horizons)
    ax.plot(horizons[order], finals[order], "o", color=CURVE_COLORS[0], label="final regret")
    # Fitted power law through the data in log space.
    intercept = np.mean(np.log(finals)) - slope * np.mean(np.log(horizons))
    grid = np.linspace(horizons.min(), horizons.max(), 50)
    ax.plot(
        grid,
        np.exp(intercept) * grid**slope,
        "--",
        color=CURVE_COLORS[1],
        label=f"slope = {slope:.3f}",
    )
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("horizon T")
    ax.set_ylabel("final mean regret")
    ax.legend()
    return slope


def render(job):
    """Render one job to its output path.

    Returns {"out": path, "kind": kind, "slope": float or None}; the slope is
    the exact closed-form least-squares value, not the rounded annotation.
    Output is deterministic given the inputs: fixed figure size, no
    timestamps (SVG metadata date stripped, object ids salted).
    """
    fig, ax = plt.subplots(figsize=FIGSIZE)
    try:
        if job.kind == "loss-curves":
            slope = _loss_curves(ax, job)
        else:
            slope = _scaling_loglog(ax, job)
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        if job.vector:
            with matplotlib.rc_context({"svg.hashsalt": SVG_HASHSALT}):
                fig.savefig(job.out, format="svg", metadata={"Date": None})
        else:
            fig.savefig(job.out, format="png", dpi=150)
    finally:
        plt.close(fig)
    return {"out": job.out, "kind": job.kind, "slope": slope}
