"""Acceptance suites: each check runs an experiment and tests a stated bound.

Every function returns a CriterionResult; the CLI prints one line per
criterion and exits nonzero when any fails.  Statistical checks compare an
empirical mean against a theoretical threshold plus three standard errors of
that mean.
"""

from __future__ import annotations

import math
import os
import tempfile
import time
from dataclasses import dataclass

import numpy as np

from . import harness
from .augmented import RestartOnMissLearner, partition_grid_learner
from .complexity import covering_number_linf, fat_shattering_dimension, verify_shattering
from .core import ExampleSequence, InvalidInputError, LossSpec, run_online
from .hypotheses import (
    bounded_variation_class,
    constant_class,
    ramp_class,
    table_class,
)
from .mwa import MultiplicativeWeights, batched_hedge, regret_bound, sampled_loss_ensemble
from .predictors import corrupted_predictor, lds_predictor, mistake_metrics, perfect_predictor, shifted_predictor
from .streams import gen_rademacher_hard, iterate_linear_system
from .transductive import TransductiveLearner, build_expert_table, transductive_regret_bound

UNIT_L1 = LossSpec("l1", 1.0, 1.0)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number:02d} {self.name}: {self.detail}"


def _mean_se(values: np.ndarray):
    values = np.asarray(values, dtype=np.float64)
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size))


def check_figure_reproduction(outdir=None) -> CriterionResult:
    """Restricted-support aggregation beats the full net, with a widening gap."""
    started = time.monotonic()
    if outdir is None:
        with tempfile.TemporaryDirectory() as tmp:
            summary = harness.reproduce_figure(tmp)
    else:
        summary = harness.reproduce_figure(outdir)
    elapsed = time.monotonic() - started
    final = summary["final_mean_cum_loss"]
    gap_early = summary["gap"]["100"]
    gap_late = summary["gap"][str(summary["horizon"])]
    passed = (
        final["restricted"] < final["full"]
        and gap_late > gap_early
        and elapsed < 300.0
    )
    detail = (
        f"final restricted {final['restricted']:.2f} vs full {final['full']:.2f}, "
        f"gap t=100 {gap_early:.2f} -> t={summary['horizon']} {gap_late:.2f}, "
        f"{elapsed:.1f}s"
    )
    return CriterionResult(1, "figure-reproduction", passed, detail)


def check_aggregation_bound(n_instances: int = 50, n_seeds: int = 200) -> CriterionResult:
    """Averaged-mode regret within sqrt(T ln K / 2) on every random instance;
    sampled-mode mean within the bound plus three standard errors."""
    rng = np.random.default_rng(1002)
    horizons = [64, 256, 1024]
    expert_counts = [2, 16, 128]
    worst_avg_slack = -math.inf
    worst_smp_slack = -math.inf
    deterministic_ok = True
    sampled_ok = True
    for i in range(n_instances):
        T = int(rng.choice(horizons))
        K = int(rng.choice(expert_counts))
        table = rng.random((K, T))
        y = rng.random(T)
        losses = np.abs(table - y[None, :])
        best = losses.sum(axis=1).min()
        bound = regret_bound(K, T)

        agg = MultiplicativeWeights(K, T, mode="averaged")
        total = 0.0
        for t in range(T):
            total += abs(agg.predict(table[:, t]) - y[t])
            agg.update(losses[:, t])
        avg_regret = total - best
        worst_avg_slack = max(worst_avg_slack, avg_regret - bound)
        if avg_regret > bound + 1e-9:
            deterministic_ok = False

        totals = sampled_loss_ensemble(losses, n_seeds, seed=int(rng.integers(2**32)))
        mean, se = _mean_se(totals - best)
        worst_smp_slack = max(worst_smp_slack, mean - (bound + 3 * se))
        if mean > bound + 3 * se:
            sampled_ok = False
    passed = deterministic_ok and sampled_ok
    detail = (
        f"{n_instances} instances; worst averaged slack {worst_avg_slack:+.3f}, "
        f"worst sampled slack over bound+3se {worst_smp_slack:+.3f}"
    )
    return CriterionResult(2, "aggregation-bound", passed, detail)


def check_cover_bound(n_seeds: int = 200) -> CriterionResult:
    """Greedy-cover learner regret within alpha L T + sqrt(T ln K_cover / 2) + 3se."""
    rng = np.random.default_rng(1003)
    T = 200
    classes = [
        constant_class(np.linspace(0.0, 1.0, 21)),
        bounded_variation_class(1.0, 3),
        ramp_class(4.0, 6),
    ]
    passed = True
    worst = -math.inf
    for fc in classes:
        x = rng.random((T, 1))
        y = rng.random(T)
        class_best = np.abs(fc.trace_matrix(x) - y[None, :]).sum(axis=1).min()
        for alpha in (0.0, 0.05, 0.1):
            table = build_expert_table(fc, x, alpha, cover_method="greedy")
            bound = transductive_regret_bound(T, table.n_experts, alpha, 1.0)
            losses = np.abs(table.predictions - y[None, :])
            totals = sampled_loss_ensemble(losses, n_seeds, seed=int(rng.integers(2**32)))
            mean, se = _mean_se(totals - class_best)
            worst = max(worst, mean - (bound + 3 * se))
            if mean > bound + 3 * se:
                passed = False
    detail = f"9 class/alpha pairs; worst slack over bound+3se {worst:+.3f}"
    return CriterionResult(3, "cover-bound", passed, detail)


def _transductive_factory(fc, spec, mode="sampled", alpha=0.0):
    def factory(suffix, seed):
        return TransductiveLearner.from_class(fc, suffix, alpha, spec, seed, mode)

    return factory


def check_perfect_predictor_equivalence(n_configs: int = 20) -> CriterionResult:
    """With a perfect predictor the restart learner reproduces the standalone
    transductive learner's per-round losses bit for bit under the same seed."""
    rng = np.random.default_rng(1004)
    mismatches = 0
    for _ in range(n_configs):
        T = int(rng.integers(30, 80))
        k = int(rng.integers(3, 9))
        fc = constant_class(np.sort(rng.random(k)))
        x = rng.random((T, 1))
        y = rng.random(T)
        seq = ExampleSequence(x, y)
        seed = int(rng.integers(2**32))

        direct = TransductiveLearner.from_class(fc, x, 0.0, UNIT_L1, seed, "sampled")
        direct_losses = run_online(direct, seq, UNIT_L1)

        restart = RestartOnMissLearner(
            perfect_predictor(x), _transductive_factory(fc, UNIT_L1), T, seed
        )
        restart_losses = run_online(restart, seq, UNIT_L1)
        if not np.array_equal(direct_losses, restart_losses) or restart.restarts != 1:
            mismatches += 1
    detail = f"{n_configs} random configs, {mismatches} mismatches"
    return CriterionResult(4, "perfect-predictor-equivalence", mismatches == 0, detail)


def check_restart_accounting() -> CriterionResult:
    """Inner-learner counts equal observed mistakes plus one, exactly."""
    rng = np.random.default_rng(1005)
    T = 60
    fc = bounded_variation_class(1.0, 2)
    failures = []

    def run_case(mode, epsilon, schedule, magnitude, pred_seed):
        x = rng.random((T, 1))
        y = fc[4].batch(x)
        seq = ExampleSequence(x, y)
        learner_pred = corrupted_predictor(x, schedule, magnitude, pred_seed, mode, epsilon)
        learner = RestartOnMissLearner(
            learner_pred, _transductive_factory(fc, UNIT_L1), T, 7
        )
        run_online(learner, seq, UNIT_L1)
        replay_pred = corrupted_predictor(x, schedule, magnitude, pred_seed, mode, epsilon)
        log = mistake_metrics(replay_pred, x, eps_grid=[epsilon] if epsilon else [])
        observed = log.zero_one_count if mode == "zero-one" else log.eps_ball_counts[epsilon]
        return learner.restarts, observed

    cases = [
        ("zero-one", None, [10, 20], 1.0, 11),
        ("zero-one", None, 0.15, 0.5, 12),
        ("eps-ball", 0.3, [5, 25, 40], 0.5, 13),
        ("eps-ball", 0.7, [5, 25, 40], 0.5, 14),
    ]
    for mode, eps, schedule, magnitude, pseed in cases:
        restarts, observed = run_case(mode, eps, schedule, magnitude, pseed)
        if restarts != observed + 1:
            failures.append(f"{mode} eps={eps}: {restarts} != {observed}+1")
    detail = "; ".join(failures) if failures else "4 cases exact (restarts = mistakes + 1)"
    return CriterionResult(5, "restart-accounting", not failures, detail)


def _corrupted_setup(T: int, n_mistakes: int, seed: int):
    """Fixed stream, planted piecewise target, and an explicit mistake schedule."""
    rng = np.random.default_rng(seed)
    x = rng.random((T, 1))
    fc = bounded_variation_class(1.0, 2)
    target = fc[int(rng.integers(len(fc)))]
    y = target.batch(x)
    if n_mistakes:
        schedule = np.linspace(2, T, n_mistakes, dtype=int)
        schedule = sorted(set(int(t) for t in schedule))
    else:
        schedule = []
    return fc, x, y, schedule


def check_restart_regret_threshold(n_seeds: int = 200) -> CriterionResult:
    """Restart-learner mean regret within (M+1) sqrt(T ln K / 2) + 3se."""
    T = 512
    passed = True
    details = []
    for n_mistakes in (0, 1, 4, 16):
        fc, x, y, schedule = _corrupted_setup(T, n_mistakes, 600 + n_mistakes)
        seq = ExampleSequence(x, y)
        expert_counts = []

        def factory(suffix, seed):
            learner = TransductiveLearner.from_class(fc, suffix, 0.0, UNIT_L1, seed, "sampled")
            expert_counts.append(learner.n_experts)
            return learner

        totals = np.empty(n_seeds)
        for s in range(n_seeds):
            predictor = corrupted_predictor(x, schedule, 0.35, 99, "zero-one")
            learner = RestartOnMissLearner(predictor, factory, T, 10_000 + s)
            totals[s] = run_online(learner, seq, UNIT_L1).sum()
            if learner.restarts != len(schedule) + 1:
                passed = False
        mean, se = _mean_se(totals)
        k = max(expert_counts)
        bound = (len(schedule) + 1) * math.sqrt(T * math.log(k) / 2.0)
        if mean > bound + 3 * se:
            passed = False
        details.append(f"M={len(schedule)}: {mean:.1f} <= {bound:.1f}+3*{se:.2f}")
    return CriterionResult(6, "restart-regret-threshold", passed, "; ".join(details))


def check_partition_meta_threshold(n_seeds: int = 200) -> CriterionResult:
    """Partition-grid aggregation within 2(M+1) sqrt((T/(M+1)+1) ln K / 2)
    + sqrt(T ln |grid| / 2) + 3se, on a grid containing each tested M."""
    T = 512
    grid = [0] + [1 << i for i in range(9)]
    passed = True
    details = []
    for n_mistakes in (0, 1, 4, 16):
        fc, x, y, schedule = _corrupted_setup(T, n_mistakes, 700 + n_mistakes)
        seq = ExampleSequence(x, y)
        expert_counts = [len(np.unique(fc.trace_matrix(x), axis=0))]

        def factory(suffix, seed):
            learner = TransductiveLearner.from_class(fc, suffix, 0.0, UNIT_L1, seed, "sampled")
            expert_counts.append(learner.n_experts)
            return learner

        def restart_factory(start, length, seed_r):
            local = [t - start for t in schedule if start + 2 <= t <= start + length]
            predictor = corrupted_predictor(x[start : start + length], local, 0.35, 99, "zero-one")
            return RestartOnMissLearner(predictor, factory, length, seed_r)

        totals = np.empty(n_seeds)
        for s in range(n_seeds):
            meta = partition_grid_learner(restart_factory, T, UNIT_L1, 20_000 + s, grid)
            totals[s] = run_online(meta, seq, UNIT_L1).sum()
        mean, se = _mean_se(totals)
        k = max(expert_counts)
        m1 = n_mistakes + 1
        bound = 2 * m1 * math.sqrt((T / m1 + 1) * math.log(k) / 2.0) + math.sqrt(
            T * math.log(len(grid)) / 2.0
        )
        if mean > bound + 3 * se:
            passed = False
        details.append(f"M={n_mistakes}: {mean:.1f} <= {bound:.1f}+3*{se:.2f}")
    return CriterionResult(7, "partition-meta-threshold", passed, "; ".join(details))


def check_ball_shift_sensitivity(n_seeds: int = 200) -> CriterionResult:
    """Ball-mode restarts under a forecast offset delta < eps: regret within the
    transductive bound plus delta L_los L_hyp T, and excess linear in delta."""
    T = 256
    epsilon = 0.05
    deltas = (0.01, 0.02, 0.04)
    rng = np.random.default_rng(1008)
    passed = True
    details = []
    for slope in (2.0, 10.0):
        fc = ramp_class(slope, 3)
        target = fc.hypotheses[1]
        # keep x and x + delta strictly inside the target ramp's rising band
        # so its per-round loss under the offset is exactly slope * delta
        f_lo = slope * max(deltas) + 0.05
        f_hi = 1.0 - slope * max(deltas) - 0.05
        x = target.a + rng.uniform(f_lo, f_hi, size=(T, 1)) / slope
        y = target.batch(x)
        seq = ExampleSequence(x, y)
        class_best = np.abs(fc.trace_matrix(x) - y[None, :]).sum(axis=1).min()

        def mean_regret(delta: float):
            counts = []

            def factory(suffix, seed):
                inner = TransductiveLearner.from_class(fc, suffix, 0.0, UNIT_L1, seed, "sampled")
                counts.append(inner.n_experts)
                return inner

            totals = np.empty(n_seeds)
            for s in range(n_seeds):
                predictor = shifted_predictor(x, delta, epsilon)
                learner = RestartOnMissLearner(predictor, factory, T, 30_000 + s)
                totals[s] = run_online(learner, seq, UNIT_L1).sum()
                if learner.restarts != 1:
                    raise AssertionError("offset below epsilon must never restart")
            mean, se = _mean_se(totals - class_best)
            return mean, se, max(counts)

        base, _, _ = mean_regret(0.0)
        excesses = []
        for delta in deltas:
            mean, se, k = mean_regret(delta)
            bound = transductive_regret_bound(T, k, 0.0, 1.0) + delta * 1.0 * slope * T
            if mean > bound + 3 * se:
                passed = False
            excesses.append(mean - base)
        for small, big in zip(excesses, excesses[1:]):
            ratio = big / small
            if not 1.4 <= ratio <= 2.6:
                passed = False
        details.append(
            f"slope {slope:g}: excesses " + "/".join(f"{e:.1f}" for e in excesses)
        )
    return CriterionResult(8, "ball-shift-sensitivity", passed, "; ".join(details))


def check_regret_scaling(n_seeds: int = 200) -> CriterionResult:
    """Mean final regret of the restart learner grows like sqrt(T).

    Stream from a stable one-dimensional linear system the forecaster
    identifies after two rounds; labels are worst-case fair coins, so
    every hypothesis has mean loss 1/2 and regret is driven purely by the
    aggregation cost the corollary bounds by sqrt(T) up to polylog."""
    horizons = [125, 250, 500, 1000, 2000]
    fc = bounded_variation_class(1.0, 2)
    means = []
    restart_ok = True
    for T in horizons:
        x = iterate_linear_system(np.array([[0.996]]), np.array([1.0]), T)
        traces = fc.trace_matrix(x)
        finals = np.empty(n_seeds)
        for s in range(n_seeds):
            rng = np.random.default_rng(40_000 + s)
            y = rng.integers(0, 2, size=T).astype(np.float64)
            seq = ExampleSequence(x, y)
            predictor = lds_predictor(T, 1, identification_rounds=1)
            learner = RestartOnMissLearner(
                predictor, _transductive_factory(fc, UNIT_L1), T, 41_000 + s
            )
            best = np.abs(traces - y[None, :]).sum(axis=1).min()
            finals[s] = run_online(learner, seq, UNIT_L1).sum() - best
            if learner.restarts > 2:
                restart_ok = False
        means.append(finals.mean())
    slope = float(np.polyfit(np.log(horizons), np.log(means), 1)[0])
    passed = restart_ok and 0.40 <= slope <= 0.65
    detail = f"slope {slope:.3f} over T={horizons}, restarts stayed O(1): {restart_ok}"
    return CriterionResult(9, "regret-scaling", passed, detail)


def check_lower_bound(n_draws: int = 1000) -> CriterionResult:
    """Every learner suffers at least (alpha/4) sqrt(T d) mean regret, minus 3se,
    on streams built from independently verified shattering certificates."""
    alpha = 1.0
    passed = True
    details = []
    for d in (1, 2, 4):
        points = np.linspace(0.1, 0.9, d)[:, None]
        patterns = np.array(
            [[alpha / 2 * s for s in sigma] for sigma in np.ndindex(*(2,) * d)]
        )
        patterns = np.where(patterns > 0, alpha / 2, -alpha / 2)
        fc = table_class(points, patterns)
        fat = fat_shattering_dimension(fc, points, alpha)
        if fat.dimension != d or not verify_shattering(fat.certificate, fc):
            passed = False
            details.append(f"d={d}: certificate invalid")
            continue
        T = 64 * d
        draws = np.empty((n_draws, T))
        for r in range(n_draws):
            draws[r] = gen_rademacher_hard(fat.certificate, T, 50_000 + r).y
        stream = gen_rademacher_hard(fat.certificate, T, 0).x
        traces = fc.trace_matrix(stream)
        spec = LossSpec("l1", 1.0, 1.5)
        best = np.abs(traces[None, :, :] - draws[:, None, :]).sum(axis=2).min(axis=1)
        threshold = alpha / 4.0 * math.sqrt(T * d)

        learner_totals = {
            "sampled": batched_hedge(traces, draws, 1.5, "sampled", 51),
            "averaged": batched_hedge(traces, draws, 1.5, "averaged", 52),
        }
        restart_totals = np.empty(n_draws)
        for r in range(n_draws):
            seq = ExampleSequence(stream, draws[r])
            learner = RestartOnMissLearner(
                perfect_predictor(stream), _transductive_factory(fc, spec), T, 60_000 + r
            )
            restart_totals[r] = run_online(learner, seq, spec).sum()
        learner_totals["restart"] = restart_totals

        def restart_factory(start, length, seed_r):
            return RestartOnMissLearner(
                perfect_predictor(stream[start : start + length]),
                _transductive_factory(fc, spec),
                length,
                seed_r,
            )

        meta_totals = np.empty(n_draws)
        for r in range(n_draws):
            meta = partition_grid_learner(restart_factory, T, spec, 70_000 + r, [0, 1, 2, 4, 8])
            meta_totals[r] = run_online(meta, ExampleSequence(stream, draws[r]), spec).sum()
        learner_totals["partition-meta"] = meta_totals

        for name, totals in learner_totals.items():
            mean, se = _mean_se(totals - best)
            if mean < threshold - 3 * se:
                passed = False
            details.append(f"d={d} {name}: {mean:.1f} >= {threshold:.1f}-3*{se:.2f}")
    return CriterionResult(10, "lower-bound", passed, "; ".join(details))


def check_dimension_oracle() -> CriterionResult:
    """Frozen dimension values, certificate re-verification, exact <= greedy covers."""
    problems = []

    single = constant_class([0.4])
    pts = np.array([[0.3], [0.7]])
    res = fat_shattering_dimension(single, pts, 0.5)
    if res.dimension != 0 or res.certificate is not None:
        problems.append("singleton class should have dimension 0")

    two = constant_class([0.0, 1.0])
    res_at_1 = fat_shattering_dimension(two, pts, 1.0)
    if res_at_1.dimension != 1:
        problems.append("two-constant class should shatter one point at width 1")
    elif not verify_shattering(res_at_1.certificate, two):
        problems.append("two-constant certificate failed independent verification")
    if fat_shattering_dimension(two, pts, 1.2).dimension != 0:
        problems.append("two-constant class must not shatter above width 1")

    rng = np.random.default_rng(1011)
    for trial in range(6):
        k = int(rng.integers(4, 12))
        fc = constant_class(rng.random(k))
        x = rng.random((int(rng.integers(5, 15)), 1))
        alpha = float(rng.uniform(0.02, 0.3))
        exact = covering_number_linf(fc, x, alpha, method="exact")
        greedy = covering_number_linf(fc, x, alpha, method="greedy")
        if not exact.exact:
            problems.append(f"trial {trial}: exact search not flagged exact")
        if exact.size > greedy.size:
            problems.append(f"trial {trial}: exact cover {exact.size} > greedy {greedy.size}")
        traces = np.unique(fc.trace_matrix(x), axis=0)
        dist = np.abs(exact.centers[:, None, :] - traces[None, :, :]).max(axis=2)
        if not np.all(dist.min(axis=0) <= alpha + 1e-9):
            problems.append(f"trial {trial}: exact cover leaves a trace uncovered")

    detail = "; ".join(problems) if problems else "dimensions, certificates, and covers all check out"
    return CriterionResult(11, "dimension-oracle", not problems, detail)


def check_determinism() -> CriterionResult:
    """One config and seed produce byte-identical CSV output twice."""
    cfg_dict = {
        "horizon": 60,
        "repetitions": 3,
        "master_seed": 99,
        "stream": {"kind": "lds-sparse", "d": 3, "c": 2},
        "class": {"kind": "junta-grid", "d": 3, "c": 2, "support": "stream"},
        "target": {"kind": "planted", "source": "class", "noise_std": 0.05},
        "loss": {"kind": "l1", "normalization_bound": "auto"},
        "learner": {"kind": "transductive", "alpha": 0.0, "mode": "sampled"},
    }
    with tempfile.TemporaryDirectory() as tmp:
        paths = [os.path.join(tmp, f"run{i}.csv") for i in (0, 1)]
        for path in paths:
            cfg = harness.ExperimentConfig.from_dict(cfg_dict)
            harness.write_result_csv(harness.run_experiment(cfg), path, per_rep=True)
        with open(paths[0], "rb") as fh:
            first = fh.read()
        with open(paths[1], "rb") as fh:
            second = fh.read()
    passed = first == second and len(first) > 0
    detail = f"two runs, {len(first)} bytes each, identical: {passed}"
    return CriterionResult(12, "determinism", passed, detail)


ALL_CHECKS = (
    ("figure-reproduction", check_figure_reproduction),
    ("aggregation-bound", check_aggregation_bound),
    ("cover-bound", check_cover_bound),
    ("perfect-predictor-equivalence", check_perfect_predictor_equivalence),
    ("restart-accounting", check_restart_accounting),
    ("restart-regret-threshold", check_restart_regret_threshold),
    ("partition-meta-threshold", check_partition_meta_threshold),
    ("ball-shift-sensitivity", check_ball_shift_sensitivity),
    ("regret-scaling", check_regret_scaling),
    ("lower-bound", check_lower_bound),
    ("dimension-oracle", check_dimension_oracle),
    ("determinism", check_determinism),
)


def run_suite(names=None):
    """Run the named acceptance suites (all by default); returns their results."""
    selected = []
    if names is None or names == ["all"] or names == "all":
        selected = [fn for _, fn in ALL_CHECKS]
    else:
        table = dict(ALL_CHECKS)
        for name in names:
            if name not in table:
                raise InvalidInputError(f"unknown suite {name!r}; known: {', '.join(table)}")
            selected.append(table[name])
    return [fn() for fn in selected]
