"""Finite classes: membership rules, counts, and trace matrices."""

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from olreg.core import EmptyClassError, InvalidInputError
from olreg.hypotheses import (
    PiecewiseConstantHypothesis,
    RampHypothesis,
    bounded_variation_class,
    constant_class,
    junta_hyperplane_class,
    load_table_class,
    ramp_class,
    table_class,
)


def test_constant_class_basics():
    fc = constant_class([0.5, 0.0, 1.0])
    assert len(fc) == 3
    assert fc.label_range == (0.0, 1.0)
    assert fc.lipschitz_constant == 0.0
    assert_array_equal(fc.trace_matrix(np.zeros((2, 1))), [[0.5, 0.5], [0.0, 0.0], [1.0, 1.0]])
    with pytest.raises(EmptyClassError):
        constant_class([])


def test_junta_counts_without_overlap():
    # no zero on the coefficient grid, so distinct supports never collide:
    # C(3, 2) * 5^2 = 75, and an explicit support keeps just its 25
    assert len(junta_hyperplane_class(3, 2)) == 75
    assert len(junta_hyperplane_class(3, 2, support=[0, 1])) == 25


def test_junta_dedup_with_zero_coefficient():
    # grid {0, 1} on 1-sparse supports of d = 2: (0,0), (1,0), (0,1), with
    # the all-zero vector shared between both supports
    fc = junta_hyperplane_class(2, 1, coefficients=(0.0, 1.0))
    assert len(fc) == 3


def test_junta_validation():
    with pytest.raises(InvalidInputError):
        junta_hyperplane_class(2, 3)
    with pytest.raises(InvalidInputError):
        junta_hyperplane_class(3, 2, support=[0])
    with pytest.raises(InvalidInputError):
        junta_hyperplane_class(3, 2, support=[0, 5])


def test_junta_trace_matches_elementwise_evaluation():
    fc = junta_hyperplane_class(4, 2, support=[1, 3])
    X = np.random.default_rng(3).normal(size=(6, 4))
    traces = fc.trace_matrix(X)
    for k in (0, 7, 24):
        for t in range(6):
            assert traces[k, t] == pytest.approx(fc[k].evaluate(X[t]))


def test_ramp_hand_values():
    h = RampHypothesis(0.2, 0.7)
    assert h.evaluate(np.array([0.1])) == 0.0
    assert h.evaluate(np.array([0.2])) == 0.0
    assert h.evaluate(np.array([0.45])) == pytest.approx(0.5)
    assert h.evaluate(np.array([0.7])) == 1.0
    assert h.evaluate(np.array([0.9])) == 1.0
    with pytest.raises(InvalidInputError):
        RampHypothesis(0.0, 0.5)
    with pytest.raises(InvalidInputError):
        RampHypothesis(0.6, 0.5)


def test_ramp_class_geometry():
    slope = 4.0
    fc = ramp_class(slope, 6)
    assert len(fc) == 6
    assert fc.lipschitz_constant == slope
    for h in fc.hypotheses:
        assert h.b - h.a == pytest.approx(1.0 / slope)
        assert 0.0 < h.a < h.b < 1.0
    # breakpoints are strictly increasing
    starts = [h.a for h in fc.hypotheses]
    assert all(a < b for a, b in zip(starts, starts[1:]))
    with pytest.raises(InvalidInputError):
        ramp_class(1.0, 3)
    with pytest.raises(EmptyClassError):
        ramp_class(2.0, 0)


def test_bounded_variation_counts_against_brute_force():
    # recounted here with exact rationals, independently of the builder
    def count(variation, cells, levels=None):
        n = levels if levels is not None else cells + 1
        grid = [Fraction(i, n - 1) for i in range(n)] if n > 1 else [Fraction(0)]
        cap = Fraction(str(variation))
        total = 0
        for combo in itertools.product(grid, repeat=cells):
            tv = sum(abs(b - a) for a, b in zip(combo, combo[1:]))
            total += tv <= cap
        return total

    assert count(1.0, 2) == 9
    assert count(0.5, 2) == 7
    assert count(1.0, 3) == 50
    assert len(bounded_variation_class(1.0, 2)) == 9
    assert len(bounded_variation_class(0.5, 2)) == 7
    assert len(bounded_variation_class(1.0, 3)) == 50


@given(st.integers(1, 4), st.sampled_from([0.0, 0.25, 0.5, 1.0, 2.0]))
@settings(max_examples=30, deadline=None)
def test_bounded_variation_members_respect_the_cap(cells, variation):
    fc = bounded_variation_class(variation, cells)
    cap = Fraction(str(variation))
    denom = cells  # levels default to cells + 1, so values are i / cells
    for h in fc.hypotheses:
        # stored values are floats of exact grid fractions; recover them
        vals = [Fraction(round(v * denom), denom) for v in h.values]
        assert all(float(f) == v for f, v in zip(vals, h.values))
        tv = sum(abs(b - a) for a, b in zip(vals, vals[1:]))
        assert tv <= cap


def test_bounded_variation_validation():
    with pytest.raises(InvalidInputError):
        bounded_variation_class(-0.1, 2)
    with pytest.raises(InvalidInputError):
        bounded_variation_class(1.0, 0)
    assert len(bounded_variation_class(1.0, 2, levels=1)) == 1


def test_piecewise_cell_lookup():
    h = PiecewiseConstantHypothesis((0.0, 1.0))
    assert h.evaluate(np.array([0.49])) == 0.0
    assert h.evaluate(np.array([0.5])) == 1.0  # boundary goes to the right cell
    assert h.evaluate(np.array([1.0])) == 1.0  # top edge clamps to the last cell
    assert h.evaluate(np.array([-3.0])) == 0.0
    assert h.evaluate(np.array([7.0])) == 1.0
    assert h.total_variation() == 1


def test_table_class_lookup_and_errors():
    points = np.array([[0.0], [1.0]])
    fc = table_class(points, [[0.25, 0.75], [1.0, 0.0]])
    assert len(fc) == 2
    assert fc[0].evaluate(np.array([1.0])) == 0.75
    assert_array_equal(fc.trace_matrix(points), [[0.25, 0.75], [1.0, 0.0]])
    with pytest.raises(InvalidInputError):
        fc[0].evaluate(np.array([0.5]))
    with pytest.raises(InvalidInputError):
        table_class(points, [[1.0]])
    with pytest.raises(EmptyClassError):
        table_class(points, np.zeros((0, 2)))


def test_table_class_rejects_conflicting_duplicates():
    points = np.array([[0.0], [0.0]])
    table_class(points, [[0.5, 0.5]])  # repeated point, consistent value: fine
    with pytest.raises(InvalidInputError):
        table_class(points, [[0.5, 0.6]])


def test_load_table_class_round_trip(tmp_path):
    path = tmp_path / "table.csv"
    path.write_text("x_1,f_1,f_2\n0.0,0.25,1.0\n1.0,0.75,0.0\n")
    fc = load_table_class(path)
    assert len(fc) == 2
    assert fc[1].evaluate(np.array([0.0])) == 1.0
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    with pytest.raises(InvalidInputError):
        load_table_class(bad)


def test_trace_matrix_checks_dimension():
    fc = constant_class([0.0])
    with pytest.raises(InvalidInputError):
        fc.trace_matrix(np.zeros((3, 2)))
    with pytest.raises(InvalidInputError):
        fc.weight_matrix()
    linear = junta_hyperplane_class(2, 1, support=[0])
    W = linear.weight_matrix()
    X = np.random.default_rng(0).normal(size=(4, 2))
    assert_allclose(linear.trace_matrix(X), W @ X.T)
