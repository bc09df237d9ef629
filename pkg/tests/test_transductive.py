"""Expert tables and the known-sequence aggregation learner."""

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from olreg.core import (
    EmptyExpertError,
    ExampleSequence,
    InvalidInputError,
    LossSpec,
    run_online,
)
from olreg.hypotheses import constant_class, junta_hyperplane_class
from olreg.mwa import batched_hedge
from olreg.transductive import (
    ExpertTable,
    TransductiveLearner,
    build_expert_table,
    transductive_regret_bound,
)

UNIT = LossSpec("l1", 1.0, 1.0)


def test_expert_table_shape_and_column():
    table = ExpertTable(np.array([[0.0, 1.0, 2.0], [3.0, 4.0, 5.0]]))
    assert table.n_experts == 2
    assert table.horizon == 3
    assert_array_equal(table.column(1), [1.0, 4.0])
    with pytest.raises(EmptyExpertError):
        ExpertTable(np.zeros((0, 3)))


def test_traces_dedup_by_default():
    fc = constant_class([0.3, 0.3, 0.9])
    X = np.zeros((4, 1))
    table = build_expert_table(fc, X, 0.0)
    assert table.provenance == "deduplicated-traces"
    assert table.n_experts == 2
    raw = build_expert_table(fc, X, 0.0, dedup=False)
    assert raw.provenance == "class-traces"
    assert raw.n_experts == 3


def test_cover_table_provenance_and_size():
    fc = constant_class(np.linspace(0.0, 1.0, 5))
    table = build_expert_table(fc, np.zeros((4, 1)), 0.25)
    assert table.provenance.startswith("cover(alpha=0.25")
    assert table.n_experts == 2
    with pytest.raises(InvalidInputError):
        build_expert_table(fc, np.zeros((4, 1)), -0.5)


def test_big_linear_class_stays_lazy():
    # 43750 hyperplanes x 50 rounds crosses the cell threshold, so the raw
    # table is never materialized; columns still match the weight matrix
    fc = junta_hyperplane_class(8, 4)
    assert len(fc) == 43750
    X = np.random.default_rng(0).normal(size=(50, 8))
    columns = build_expert_table(fc, X, 0.0, dedup=False)
    assert not hasattr(columns, "predictions")
    assert columns.n_experts == 43750
    assert columns.horizon == 50
    assert_allclose(columns.column(7), fc.weight_matrix() @ X[7])
    assert columns.provenance == "class-traces"


def test_learner_enforces_predict_observe_order():
    table = ExpertTable(np.array([[0.0, 1.0]]))
    learner = TransductiveLearner(table, UNIT, seed=0)
    with pytest.raises(InvalidInputError):
        learner.observe(0.5)
    learner.predict()
    learner.observe(0.5)
    learner.predict()
    learner.observe(0.5)
    with pytest.raises(InvalidInputError):
        learner.predict()


def test_averaged_learner_matches_batched_reference():
    rng = np.random.default_rng(6)
    table_values = rng.random((4, 30))
    y = rng.random(30)
    learner = TransductiveLearner(ExpertTable(table_values), UNIT, seed=0, mode="averaged")
    total = 0.0
    for t in range(30):
        total += abs(learner.predict() - y[t])
        learner.observe(y[t])
    reference = batched_hedge(table_values, y[None, :], 1.0, mode="averaged")
    assert total == pytest.approx(float(reference[0]), abs=1e-9)


def test_run_online_respects_the_transductive_bound():
    # deterministic for averaged mode: alpha-cover cost plus aggregation cost
    rng = np.random.default_rng(7)
    for alpha in (0.0, 0.1):
        values = rng.random(9)
        fc = constant_class(values)
        T = 60
        x = rng.random((T, 1))
        y = rng.random(T)
        learner = TransductiveLearner.from_class(fc, x, alpha, UNIT, seed=1, mode="averaged")
        realized = run_online(learner, ExampleSequence(x, y), UNIT)
        best = np.abs(fc.trace_matrix(x) - y[None, :]).sum(axis=1).min()
        bound = transductive_regret_bound(T, learner.n_experts, alpha, UNIT.lipschitz_constant)
        assert realized.sum() - best <= bound + 1e-9


def test_sampled_mode_is_seed_deterministic():
    fc = constant_class([0.0, 0.5, 1.0])
    x = np.zeros((20, 1))
    y = np.random.default_rng(2).random(20)
    runs = []
    for _ in range(2):
        learner = TransductiveLearner.from_class(fc, x, 0.0, UNIT, seed=123)
        runs.append(run_online(learner, ExampleSequence(x, y), UNIT))
    assert_array_equal(runs[0], runs[1])


def test_regret_bound_frozen_value():
    # 0.1 * 1 * 100 + sqrt(100 ln 4 / 2), worked out independently
    assert transductive_regret_bound(100, 4, 0.1, 1.0) == pytest.approx(
        18.325546111576976, abs=1e-12
    )
    assert transductive_regret_bound(50, 1, 0.0, 1.0) == 0.0
    with pytest.raises(InvalidInputError):
        transductive_regret_bound(0, 4, 0.1, 1.0)
    with pytest.raises(InvalidInputError):
        transductive_regret_bound(100, 0, 0.1, 1.0)
