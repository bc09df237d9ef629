"""Config-driven experiment runner with deterministic CSV output.

A JSON config names a stream, a hypothesis class, a loss, a target, and a
learner.  Each repetition r reruns everything under seed master_seed + r,
with component seeds derived from that, so a config and seed pin the output
bytes exactly.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import augmented, hypotheses, predictors, streams, transductive
from .augmented import derive_seed
from .core import ExampleSequence, InvalidInputError, LossSpec, RegretReport, run_online

PACKAGE_VERSION = "0.1.0"


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise InvalidInputError(f"{context}: missing required field {key!r}")
    return mapping[key]


def build_class(spec: dict, stream_support=None) -> hypotheses.FunctionClass:
    kind = _require(spec, "kind", "class")
    if kind == "constants":
        return hypotheses.constant_class(_require(spec, "values", "class.constants"))
    if kind == "junta-grid":
        d = int(_require(spec, "d", "class.junta-grid"))
        c = int(_require(spec, "c", "class.junta-grid"))
        support = spec.get("support")
        if support == "stream":
            if stream_support is None:
                raise InvalidInputError("class.support: 'stream' needs an lds-sparse stream")
            support = stream_support
        coefficients = spec.get("coefficients", hypotheses.JUNTA_COEFFICIENT_GRID)
        return hypotheses.junta_hyperplane_class(d, c, support, coefficients)
    if kind == "bounded-variation":
        return hypotheses.bounded_variation_class(
            float(_require(spec, "variation", "class.bounded-variation")),
            int(_require(spec, "cells", "class.bounded-variation")),
            spec.get("levels"),
        )
    if kind == "ramp":
        return hypotheses.ramp_class(
            float(_require(spec, "slope", "class.ramp")),
            int(_require(spec, "count", "class.ramp")),
        )
    if kind == "table":
        return hypotheses.load_table_class(_require(spec, "path", "class.table"))
    raise InvalidInputError(f"class.kind: unknown kind {kind!r}")


def build_predictor(spec: dict, truth: np.ndarray, seed, mode: str, epsilon):
    kind = _require(spec, "kind", "predictor")
    horizon, dim = truth.shape
    if kind == "perfect":
        return predictors.perfect_predictor(truth, mode, epsilon)
    if kind == "repeat-last":
        return predictors.repeat_last_predictor(horizon, dim, mode, epsilon)
    if kind == "lds":
        return predictors.lds_predictor(
            horizon, dim, int(spec.get("identification_rounds", dim)), mode, epsilon
        )
    if kind == "corrupted":
        schedule = spec.get("schedule")
        if schedule is None:
            schedule = float(_require(spec, "rate", "predictor.corrupted"))
        return predictors.corrupted_predictor(
            truth,
            schedule,
            float(_require(spec, "magnitude", "predictor.corrupted")),
            seed,
            mode,
            epsilon,
        )
    if kind == "shifted":
        if mode != "eps-ball":
            raise InvalidInputError("predictor.shifted only makes sense in eps-ball mode")
        return predictors.shifted_predictor(truth, float(_require(spec, "delta", "predictor.shifted")), epsilon)
    raise InvalidInputError(f"predictor.kind: unknown kind {kind!r}")


@dataclass
class ExperimentConfig:
    horizon: int
    repetitions: int
    master_seed: int
    stream: dict
    function_class: dict
    target: dict
    loss: dict
    learner: dict
    baseline: str = "final-minimizer"

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        cfg = cls(
            horizon=int(_require(raw, "horizon", "config")),
            repetitions=int(_require(raw, "repetitions", "config")),
            master_seed=int(_require(raw, "master_seed", "config")),
            stream=dict(_require(raw, "stream", "config")),
            function_class=dict(_require(raw, "class", "config")),
            target=dict(raw.get("target", {"kind": "planted", "source": "class", "noise_std": 0.0})),
            loss=dict(raw.get("loss", {"kind": "l1", "normalization_bound": "auto"})),
            learner=dict(_require(raw, "learner", "config")),
            baseline=raw.get("baseline", "final-minimizer"),
        )
        if cfg.horizon < 1:
            raise InvalidInputError("config.horizon: must be at least 1")
        if cfg.repetitions < 1:
            raise InvalidInputError("config.repetitions: must be at least 1")
        if cfg.baseline not in ("final-minimizer", "prefix-best"):
            raise InvalidInputError(f"config.baseline: unknown value {cfg.baseline!r}")
        return cfg

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def resolved(self) -> dict:
        return {
            "horizon": self.horizon,
            "repetitions": self.repetitions,
            "master_seed": self.master_seed,
            "stream": self.stream,
            "class": self.function_class,
            "target": self.target,
            "loss": self.loss,
            "learner": self.learner,
            "baseline": self.baseline,
        }


@dataclass
class ExperimentResult:
    config: dict
    mean_cum_loss: np.ndarray
    mean_cum_best: np.ndarray
    mean_regret: np.ndarray
    stderr_regret: np.ndarray
    per_rep_regret: np.ndarray
    rep_details: list = field(default_factory=list)

    @property
    def horizon(self) -> int:
        return self.mean_cum_loss.shape[0]


def _build_stream(cfg: ExperimentConfig, rep_seed):
    kind = _require(cfg.stream, "kind", "stream")
    if kind == "lds-sparse":
        stream = streams.gen_lds_sparse(
            int(_require(cfg.stream, "d", "stream.lds-sparse")),
            int(_require(cfg.stream, "c", "stream.lds-sparse")),
            cfg.horizon,
            derive_seed(rep_seed, 1),
        )
        return stream.x, stream.support
    if kind == "iid-uniform":
        d = int(_require(cfg.stream, "d", "stream.iid-uniform"))
        if d < 1:
            raise InvalidInputError("stream.iid-uniform: d must be positive")
        rng = np.random.default_rng(derive_seed(rep_seed, 1))
        return rng.random((cfg.horizon, d)), None
    if kind in ("csv", "explicit-csv"):
        x, y = streams.read_stream_csv(_require(cfg.stream, "path", "stream.csv"))
        if x.shape[0] < cfg.horizon:
            raise InvalidInputError("stream.csv: file shorter than the configured horizon")
        return x[: cfg.horizon], None
    raise InvalidInputError(f"stream.kind: unknown kind {kind!r}")


def _build_labels(cfg: ExperimentConfig, x, support, function_class, rep_seed):
    kind = _require(cfg.target, "kind", "target")
    if kind == "csv-labels":
        _, y = streams.read_stream_csv(_require(cfg.stream, "path", "target.csv-labels"))
        return y[: cfg.horizon], {"target": "csv"}
    if kind != "planted":
        raise InvalidInputError(f"target.kind: unknown kind {kind!r}")
    source = cfg.target.get("source", "class")
    if source == "class":
        pool = function_class
    elif source == "restricted-junta":
        if support is None:
            raise InvalidInputError("target.source: restricted-junta needs an lds-sparse stream")
        pool = hypotheses.junta_hyperplane_class(
            int(cfg.function_class["d"]),
            int(cfg.function_class["c"]),
            support,
            cfg.function_class.get("coefficients", hypotheses.JUNTA_COEFFICIENT_GRID),
        )
    else:
        raise InvalidInputError(f"target.source: unknown source {source!r}")
    rng = np.random.default_rng(derive_seed(rep_seed, 2))
    index = int(rng.integers(len(pool)))
    target = pool[index]
    noise_std = float(cfg.target.get("noise_std", 0.0))
    y = streams.label_with_noise(x, target, noise_std, derive_seed(rep_seed, 3))
    return y, {"target": "planted", "target_index": index, "noise_std": noise_std}


def _max_expert_loss(columns, y: np.ndarray) -> float:
    worst = 0.0
    for t in range(y.shape[0]):
        worst = max(worst, float(np.abs(columns.column(t) - y[t]).max()))
    return worst


def _loss_spec(cfg: ExperimentConfig, columns, y) -> LossSpec:
    kind = cfg.loss.get("kind", "l1")
    if kind != "l1":
        raise InvalidInputError("config loss: only the builtin absolute loss is configurable")
    bound = cfg.loss.get("normalization_bound", "auto")
    if bound == "auto":
        if columns is None:
            raise InvalidInputError(
                "loss.normalization_bound: 'auto' needs a fixed expert table; "
                "forecast-driven learners require an explicit bound"
            )
        bound = max(1.0, _max_expert_loss(columns, y))
    return LossSpec("l1", 1.0, float(bound))


def _lazy_regret(columns, y: np.ndarray, realized: np.ndarray, baseline: str, seed) -> RegretReport:
    """Regret against a class exposed only through per-round prediction columns."""
    T = y.shape[0]
    totals = np.zeros(columns.n_experts)
    prefix_best = np.empty(T)
    for t in range(T):
        totals += np.abs(columns.column(t) - y[t])
        prefix_best[t] = totals.min()
    if baseline == "prefix-best":
        cum_best = prefix_best
    else:
        winner = int(np.argmin(totals))
        cum_best = np.cumsum(
            [abs(float(columns.column(t)[winner]) - y[t]) for t in range(T)]
        )
    return RegretReport(np.cumsum(realized), cum_best, seed=seed)


def _build_learner(cfg: ExperimentConfig, function_class, x, y, spec: LossSpec, rep_seed):
    kind = _require(cfg.learner, "kind", "learner")
    seed = derive_seed(rep_seed, 4)
    mode = cfg.learner.get("mode", "sampled")
    detail = {}

    if kind in ("mwa", "transductive"):
        alpha = float(cfg.learner.get("alpha", 0.0))
        dedup = bool(cfg.learner.get("dedup", kind == "transductive"))
        table = transductive.build_expert_table(
            function_class, x, alpha, dedup=dedup, cover_method=cfg.learner.get("cover_method", "auto")
        )
        detail["n_experts"] = table.n_experts
        learner = transductive.TransductiveLearner(table, spec, seed, mode)
        return learner, detail

    pred_seed = derive_seed(rep_seed, 5)
    alpha = float(cfg.learner.get("alpha", 0.0))

    def inner_factory(suffix, inner_seed):
        return transductive.TransductiveLearner.from_class(
            function_class, suffix, alpha, spec, inner_seed, mode
        )

    if kind in ("restart", "restart-eps"):
        pred_mode = "zero-one" if kind == "restart" else "eps-ball"
        epsilon = cfg.learner.get("epsilon") if kind == "restart-eps" else None
        predictor = build_predictor(
            dict(_require(cfg.learner, "predictor", "learner")), x, pred_seed, pred_mode, epsilon
        )
        learner = augmented.RestartOnMissLearner(predictor, inner_factory, cfg.horizon, seed)
        return learner, detail

    if kind in ("partition-grid-meta", "eps-grid-meta"):
        pred_spec = dict(_require(cfg.learner, "predictor", "learner"))
        epsilon = cfg.learner.get("epsilon")
        pred_mode = "eps-ball" if kind == "eps-grid-meta" or epsilon is not None else "zero-one"

        def restart_factory_for(eps):
            def restart_factory(start, length, seed_r):
                sub_truth = x[start : start + length]
                predictor = build_predictor(
                    pred_spec, sub_truth, derive_seed(seed_r, 7), pred_mode, eps
                )
                return augmented.RestartOnMissLearner(predictor, inner_factory, length, seed_r)

            return restart_factory

        if kind == "partition-grid-meta":
            learner = augmented.partition_grid_learner(
                restart_factory_for(epsilon),
                cfg.horizon,
                spec,
                seed,
                cfg.learner.get("grid"),
                mode,
            )
            detail["grid"] = list(learner.grid)
            return learner, detail

        kappa = float(cfg.learner.get("kappa", 1.0))

        def expert_factory(eps, seed_e):
            return augmented.partition_grid_learner(
                restart_factory_for(eps), cfg.horizon, spec, seed_e, cfg.learner.get("grid"), mode
            )

        learner = augmented.epsilon_grid_learner(expert_factory, cfg.horizon, spec, seed, kappa, mode)
        detail["grid"] = list(learner.grid)
        return learner, detail

    raise InvalidInputError(f"learner.kind: unknown kind {kind!r}")


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    reports = []
    details = []
    for r in range(cfg.repetitions):
        rep_seed = cfg.master_seed + r
        x, support = _build_stream(cfg, rep_seed)
        function_class = build_class(cfg.function_class, support)
        y, target_detail = _build_labels(cfg, x, support, function_class, rep_seed)

        class_columns = transductive.build_expert_table(function_class, x, 0.0, dedup=False)
        fixed_table = cfg.learner.get("kind") in ("mwa", "transductive")
        spec = _loss_spec(cfg, class_columns if fixed_table else None, y)
        learner, learner_detail = _build_learner(cfg, function_class, x, y, spec, rep_seed)

        seq = ExampleSequence(x, y)
        realized = run_online(learner, seq, spec)
        report = _lazy_regret(class_columns, y, realized, cfg.baseline, rep_seed)
        reports.append(report)
        details.append(
            {
                "repetition": r,
                "rep_seed": rep_seed,
                "support": list(support) if support is not None else None,
                "normalization_bound": spec.normalization_bound,
                **target_detail,
                **learner_detail,
            }
        )
    cum_loss = np.vstack([rep.cumulative_loss for rep in reports])
    cum_best = np.vstack([rep.cumulative_best for rep in reports])
    regret = cum_loss - cum_best
    if cfg.repetitions > 1:
        stderr = regret.std(axis=0, ddof=1) / math.sqrt(cfg.repetitions)
    else:
        stderr = np.zeros(cfg.horizon)
    return ExperimentResult(
        config=cfg.resolved(),
        mean_cum_loss=cum_loss.mean(axis=0),
        mean_cum_best=cum_best.mean(axis=0),
        mean_regret=regret.mean(axis=0),
        stderr_regret=stderr,
        per_rep_regret=regret,
        rep_details=details,
    )


def write_result_csv(result: ExperimentResult, path, per_rep: bool = False) -> None:
    header = ["t", "mean_cum_loss", "mean_cum_best", "mean_regret", "stderr_regret"]
    reps = result.per_rep_regret.shape[0]
    if per_rep:
        header += [f"rep{r}_regret" for r in range(reps)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for t in range(result.horizon):
            row = [
                t + 1,
                repr(float(result.mean_cum_loss[t])),
                repr(float(result.mean_cum_best[t])),
                repr(float(result.mean_regret[t])),
                repr(float(result.stderr_regret[t])),
            ]
            if per_rep:
                row += [repr(float(result.per_rep_regret[r, t])) for r in range(reps)]
            writer.writerow(row)


def write_sidecar(result: ExperimentResult, path, commit: str = "unknown") -> None:
    payload = {
        "package_version": PACKAGE_VERSION,
        "commit": commit,
        "config": result.config,
        "repetitions": result.rep_details,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def figure_configs(horizon: int = 1000, repetitions: int = 10, master_seed: int = 2024):
    """Paired restricted-net and full-net configs over identical streams."""
    base = {
        "horizon": horizon,
        "repetitions": repetitions,
        "master_seed": master_seed,
        "stream": {"kind": "lds-sparse", "d": 8, "c": 4},
        "target": {"kind": "planted", "source": "restricted-junta", "noise_std": 0.1},
        "loss": {"kind": "l1", "normalization_bound": "auto"},
        # weighted-mean output: one sampled trajectory per net per repetition
        # would leave the restricted-vs-full separation inside sampling noise
        "learner": {"kind": "mwa", "mode": "averaged"},
    }
    restricted = dict(base, **{"class": {"kind": "junta-grid", "d": 8, "c": 4, "support": "stream"}})
    full = dict(base, **{"class": {"kind": "junta-grid", "d": 8, "c": 4, "support": None}})
    return ExperimentConfig.from_dict(restricted), ExperimentConfig.from_dict(full)


def reproduce_figure(outdir, horizon: int = 1000, repetitions: int = 10, master_seed: int = 2024):
    """Run both nets, write restricted.csv / full.csv / summary.json; returns the summary."""
    import os

    os.makedirs(outdir, exist_ok=True)
    restricted_cfg, full_cfg = figure_configs(horizon, repetitions, master_seed)
    restricted = run_experiment(restricted_cfg)
    full = run_experiment(full_cfg)
    write_result_csv(restricted, os.path.join(outdir, "restricted.csv"))
    write_sidecar(restricted, os.path.join(outdir, "restricted.json"))
    write_result_csv(full, os.path.join(outdir, "full.csv"))
    write_sidecar(full, os.path.join(outdir, "full.json"))
    checkpoints = sorted({min(100, horizon), horizon})
    summary = {
        "horizon": horizon,
        "repetitions": repetitions,
        "master_seed": master_seed,
        "final_mean_cum_loss": {
            "restricted": float(restricted.mean_cum_loss[-1]),
            "full": float(full.mean_cum_loss[-1]),
        },
        "gap": {
            str(t): float(full.mean_cum_loss[t - 1] - restricted.mean_cum_loss[t - 1])
            for t in checkpoints
        },
    }
    with open(os.path.join(outdir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary
