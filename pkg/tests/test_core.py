"""Loss functions, sequences, and regret accounting."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from olreg.core import (
    EmptyClassError,
    ExampleSequence,
    InvalidInputError,
    LabeledExample,
    LossSpec,
    RegretReport,
    accumulate_regret,
    best_in_class_loss,
    class_cumulative_losses,
    loss,
    loss_vector,
    run_online,
)
from olreg.hypotheses import constant_class

L1 = LossSpec("l1", 1.0, 1.0)

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


def test_l1_loss_values():
    assert loss(L1, 0.25, 1.0) == 0.75
    assert loss(L1, 1.0, 1.0) == 0.0
    assert loss(L1, -2.0, 3.0) == 5.0


@given(finite, finite)
def test_l1_loss_symmetric_nonnegative(a, b):
    assert loss(L1, a, b) >= 0.0
    assert loss(L1, a, b) == loss(L1, b, a)


@given(finite, finite, finite)
def test_l1_loss_lipschitz_in_prediction(a, b, y):
    # |l(a, y) - l(b, y)| <= |a - b| with Lipschitz constant 1
    assert abs(loss(L1, a, y) - loss(L1, b, y)) <= abs(a - b) + 1e-9


def test_loss_rejects_nonfinite():
    with pytest.raises(InvalidInputError):
        loss(L1, float("nan"), 0.0)
    with pytest.raises(InvalidInputError):
        loss(L1, 0.0, float("inf"))


def test_loss_spec_validation():
    with pytest.raises(InvalidInputError):
        LossSpec(kind="l2")
    with pytest.raises(InvalidInputError):
        LossSpec(kind="custom")  # needs a callable
    with pytest.raises(InvalidInputError):
        LossSpec(kind="l1", fn=lambda a, b: 0.0)
    with pytest.raises(InvalidInputError):
        LossSpec(normalization_bound=0.0)
    with pytest.raises(InvalidInputError):
        LossSpec(lipschitz_constant=-1.0)


def test_custom_loss_must_be_finite_nonnegative():
    bad = LossSpec("custom", fn=lambda a, b: a - b)
    assert loss(bad, 3.0, 1.0) == 2.0
    with pytest.raises(InvalidInputError):
        loss(bad, 1.0, 3.0)


def test_loss_vector_matches_scalar():
    preds = np.array([0.0, 0.5, 2.0])
    assert_array_equal(loss_vector(L1, preds, 1.0), [1.0, 0.5, 1.0])
    quad = LossSpec("custom", fn=lambda a, b: (a - b) ** 2)
    assert_allclose(loss_vector(quad, preds, 1.0), [1.0, 0.25, 1.0])


def test_labeled_example_basics():
    ex = LabeledExample([1.0, 2.0], 3)
    assert ex.dim == 2
    assert ex.y == 3.0
    with pytest.raises(InvalidInputError):
        LabeledExample([np.nan], 0.0)
    with pytest.raises(InvalidInputError):
        LabeledExample([[1.0, 2.0]], 0.0)


def test_example_sequence_promotes_flat_x():
    seq = ExampleSequence(np.arange(4.0), np.zeros(4))
    assert seq.x.shape == (4, 1)
    assert seq.horizon == 4 and seq.dim == 1 and len(seq) == 4
    rows = list(seq)
    assert rows[2].x[0] == 2.0


def test_example_sequence_validation():
    with pytest.raises(InvalidInputError):
        ExampleSequence(np.zeros((3, 2)), np.zeros(4))
    with pytest.raises(InvalidInputError):
        ExampleSequence(np.zeros((0, 2)), np.zeros(0))
    with pytest.raises(InvalidInputError):
        ExampleSequence(np.array([[np.inf]]), np.zeros(1))


def test_regret_report_is_the_difference():
    report = RegretReport(np.array([1.0, 3.0]), np.array([0.5, 1.0]))
    assert_array_equal(report.regret, [0.5, 2.0])
    assert report.final_regret == 2.0
    with pytest.raises(InvalidInputError):
        RegretReport(np.zeros(3), np.zeros(2))


def test_class_cumulative_losses_by_hand():
    fc = constant_class([0.0, 1.0])
    seq = ExampleSequence(np.zeros((3, 1)), np.array([0.0, 1.0, 1.0]))
    cum = class_cumulative_losses(fc, seq, L1)
    # constant 0 loses 0, 1, 1; constant 1 loses 1, 0, 0
    assert_array_equal(cum, [[0.0, 1.0, 2.0], [1.0, 1.0, 1.0]])


def test_best_in_class_breaks_ties_low():
    # 0.25 and 0.75 are both exactly 0.25 away from 0.5 in binary, so the
    # tie is real and must break toward the lower index
    fc = constant_class([0.25, 0.75])
    seq = ExampleSequence(np.zeros((2, 1)), np.array([0.5, 0.5]))
    total, index = best_in_class_loss(fc, seq, L1)
    assert total == 0.5
    assert index == 0


def test_best_in_class_rejects_empty_class():
    from olreg.hypotheses import FunctionClass

    empty = FunctionClass((), 1, (0.0, 0.0), 0.0)
    seq = ExampleSequence(np.zeros((2, 1)), np.zeros(2))
    with pytest.raises(EmptyClassError):
        best_in_class_loss(empty, seq, L1)


def test_accumulate_regret_baselines():
    fc = constant_class([0.0, 1.0])
    y = np.array([1.0, 0.0, 0.0, 0.0])
    seq = ExampleSequence(np.zeros((4, 1)), y)
    losses = np.full(4, 0.5)
    final = accumulate_regret(losses, fc, seq, L1, baseline="final-minimizer")
    prefix = accumulate_regret(losses, fc, seq, L1, baseline="prefix-best")
    # the prefix-best curve can only be lower, so its regret is weakly larger
    assert np.all(prefix.regret >= final.regret - 1e-12)
    assert prefix.regret[0] == pytest.approx(0.5)  # best prefix loss after round 1 is 0
    with pytest.raises(InvalidInputError):
        accumulate_regret(losses, fc, seq, L1, baseline="oracle")
    with pytest.raises(InvalidInputError):
        accumulate_regret(losses[:3], fc, seq, L1)


class _SpyLearner:
    """Predicts the count of labels seen so far; fails if fed early labels."""

    def __init__(self):
        self.labels = []

    def predict(self, x):
        return float(len(self.labels))

    def observe(self, y):
        self.labels.append(y)


def test_run_online_feeds_labels_after_predictions():
    seq = ExampleSequence(np.zeros((3, 1)), np.array([5.0, 6.0, 7.0]))
    spy = _SpyLearner()
    realized = run_online(spy, seq, L1)
    # prediction at round t is t-1, so losses are |y_t - (t-1)| computed
    # before y_t is revealed
    assert_array_equal(realized, [5.0, 5.0, 5.0])
    assert spy.labels == [5.0, 6.0, 7.0]
