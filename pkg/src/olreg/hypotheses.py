"""Finite hypothesis classes over real-vector examples.

Every class is an explicit finite collection with a shared input dimension,
a label range, and a worst-case Lipschitz constant.  Trace matrices (one row
of predictions per hypothesis) are the common currency consumed by covers,
complexity measures, and learners.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import EmptyClassError, InvalidInputError


def _exact(value) -> Fraction:
    """Exact rational for a decimal-looking number (0.2 -> 1/5, not a binary float)."""
    return Fraction(str(value))


@dataclass(frozen=True)
class ConstantHypothesis:
    value: float

    def evaluate(self, x: np.ndarray) -> float:
        return float(self.value)

    def batch(self, X: np.ndarray) -> np.ndarray:
        return np.full(X.shape[0], float(self.value))


@dataclass(frozen=True)
class LinearHypothesis:
    """Homogeneous hyperplane x -> w . x (no intercept, no output clipping)."""

    weights: tuple

    def evaluate(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=np.float64).ravel()
        if x.shape[0] != len(self.weights):
            raise InvalidInputError(
                f"hypothesis expects dimension {len(self.weights)}, got {x.shape[0]}"
            )
        return float(np.dot(self.weights, x))

    def batch(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ np.asarray(self.weights)


@dataclass(frozen=True)
class RampHypothesis:
    """0 below ``a``, 1 above ``b``, linear in between; slope 1/(b-a)."""

    a: float
    b: float

    def __post_init__(self):
        if not (0.0 < self.a < self.b < 1.0):
            raise InvalidInputError("ramp breakpoints need 0 < a < b < 1")

    def evaluate(self, x: np.ndarray) -> float:
        x0 = float(np.asarray(x).ravel()[0])
        return float(np.clip((x0 - self.a) / (self.b - self.a), 0.0, 1.0))

    def batch(self, X: np.ndarray) -> np.ndarray:
        x0 = np.asarray(X, dtype=np.float64)[:, 0]
        return np.clip((x0 - self.a) / (self.b - self.a), 0.0, 1.0)


@dataclass(frozen=True)
class PiecewiseConstantHypothesis:
    """Constant on each of ``len(values)`` equal-width cells of [0, 1].

    Inputs are clamped to [0, 1] before the cell lookup.
    """

    values: tuple

    def total_variation(self) -> Fraction:
        vals = [_exact(v) for v in self.values]
        return sum((abs(b - a) for a, b in zip(vals, vals[1:])), Fraction(0))

    def _cells(self, x0: np.ndarray) -> np.ndarray:
        m = len(self.values)
        idx = np.floor(np.clip(x0, 0.0, 1.0) * m).astype(int)
        return np.minimum(idx, m - 1)

    def evaluate(self, x: np.ndarray) -> float:
        x0 = np.asarray([float(np.asarray(x).ravel()[0])])
        return float(np.asarray(self.values)[self._cells(x0)][0])

    def batch(self, X: np.ndarray) -> np.ndarray:
        x0 = np.asarray(X, dtype=np.float64)[:, 0]
        return np.asarray(self.values, dtype=np.float64)[self._cells(x0)]


class TableHypothesis:
    """Explicit lookup table on a fixed finite set of points.

    Evaluation requires a bitwise match with a stored point; anything else is
    an input error, since the table says nothing off its domain.
    """

    def __init__(self, points: np.ndarray, values: np.ndarray):
        points = np.asarray(points, dtype=np.float64)
        if points.ndim == 1:
            points = points[:, None]
        values = np.asarray(values, dtype=np.float64).ravel()
        if points.shape[0] != values.shape[0]:
            raise InvalidInputError("one value per table point required")
        self._map = {}
        for row, v in zip(points, values):
            key = row.tobytes()
            if key in self._map and self._map[key] != v:
                raise InvalidInputError("conflicting values for a repeated table point")
            self._map[key] = float(v)
        self.dim = points.shape[1]
        self.values = values

    def evaluate(self, x: np.ndarray) -> float:
        key = np.asarray(x, dtype=np.float64).ravel().tobytes()
        if key not in self._map:
            raise InvalidInputError("point not present in hypothesis table")
        return self._map[key]

    def batch(self, X: np.ndarray) -> np.ndarray:
        return np.array([self.evaluate(row) for row in np.asarray(X, dtype=np.float64)])


@dataclass(frozen=True)
class FunctionClass:
    """A finite hypothesis class with shared metadata."""

    hypotheses: tuple
    dim: int
    label_range: tuple
    lipschitz_constant: float
    kind: str = "mixed"

    def __len__(self) -> int:
        return len(self.hypotheses)

    def __getitem__(self, i):
        return self.hypotheses[i]

    def trace_matrix(self, X: np.ndarray) -> np.ndarray:
        """(K, T) prediction matrix of the whole class on the points ``X``."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None]
        if X.shape[1] != self.dim:
            raise InvalidInputError(
                f"class expects dimension {self.dim}, got {X.shape[1]}"
            )
        if len(self.hypotheses) == 0:
            raise EmptyClassError("empty class has no traces")
        if self.kind == "linear":
            W = np.array([h.weights for h in self.hypotheses])
            return W @ X.T
        return np.vstack([h.batch(X) for h in self.hypotheses])

    def weight_matrix(self) -> np.ndarray:
        if self.kind != "linear":
            raise InvalidInputError("weight matrix only defined for linear classes")
        return np.array([h.weights for h in self.hypotheses])


def constant_class(values) -> FunctionClass:
    values = [float(v) for v in values]
    if not values:
        raise EmptyClassError("constant class needs at least one value")
    hyps = tuple(ConstantHypothesis(v) for v in values)
    return FunctionClass(hyps, 1, (min(values), max(values)), 0.0, kind="constant")


JUNTA_COEFFICIENT_GRID = (-0.6, -0.2, 0.2, 0.6, 1.0)


def junta_hyperplane_class(
    d: int,
    c: int,
    support=None,
    coefficients=JUNTA_COEFFICIENT_GRID,
) -> FunctionClass:
    """All c-sparse hyperplanes on a coefficient grid, in dimension d.

    With an explicit ``support`` the class places every grid combination on
    those coordinates (the restricted net).  Without one it takes the union
    over all size-c supports, deduplicated exactly on rational coefficients.
    """
    if not (1 <= c <= d):
        raise InvalidInputError("need 1 <= c <= d")
    grid = tuple(_exact(v) for v in coefficients)
    if support is not None:
        supports = [tuple(sorted(int(i) for i in support))]
        if len(supports[0]) != c or not all(0 <= i < d for i in supports[0]):
            raise InvalidInputError("support must list c distinct coordinates below d")
    else:
        supports = list(itertools.combinations(range(d), c))
    seen = {}
    for sup in supports:
        for combo in itertools.product(grid, repeat=c):
            w = [Fraction(0)] * d
            for i, coef in zip(sup, combo):
                w[i] = coef
            seen.setdefault(tuple(w), None)
    hyps = tuple(
        LinearHypothesis(tuple(float(wi) for wi in w)) for w in seen
    )
    lip = max(math.sqrt(sum(float(wi) ** 2 for wi in w)) for w in seen)
    return FunctionClass(hyps, d, (-math.inf, math.inf), lip, kind="linear")


def ramp_class(slope: float, count: int) -> FunctionClass:
    """``count`` ramps of fixed slope, lower breakpoints evenly spaced in (0, 1-1/slope)."""
    if slope <= 1.0:
        raise InvalidInputError("ramp slope must exceed 1 so that b = a + 1/slope < 1")
    if count < 1:
        raise EmptyClassError("ramp class needs at least one hypothesis")
    width = 1.0 / slope
    offsets = np.linspace(0.0, 1.0 - width, count + 2)[1:-1]
    hyps = tuple(RampHypothesis(float(a), float(a + width)) for a in offsets)
    return FunctionClass(hyps, 1, (0.0, 1.0), float(slope), kind="ramp")


def bounded_variation_class(variation: float, cells: int, levels: int | None = None) -> FunctionClass:
    """Piecewise constants on ``cells`` equal cells with total variation <= ``variation``.

    Cell values come from an evenly spaced grid of ``levels`` points in [0, 1]
    (default cells + 1).  Admission uses exact rational arithmetic, so a
    hypothesis sits in the class iff its true total variation clears the cap.
    """
    if variation < 0:
        raise InvalidInputError("variation budget must be nonnegative")
    if cells < 1:
        raise InvalidInputError("need at least one cell")
    n_levels = levels if levels is not None else cells + 1
    if n_levels < 1:
        raise InvalidInputError("need at least one value level")
    if n_levels == 1:
        grid = [Fraction(0)]
    else:
        grid = [Fraction(i, n_levels - 1) for i in range(n_levels)]
    cap = _exact(variation)
    hyps = []
    for combo in itertools.product(grid, repeat=cells):
        tv = sum((abs(b - a) for a, b in zip(combo, combo[1:])), Fraction(0))
        if tv <= cap:
            hyps.append(PiecewiseConstantHypothesis(tuple(float(v) for v in combo)))
    return FunctionClass(tuple(hyps), 1, (0.0, 1.0), math.inf, kind="piecewise")


def table_class(points: np.ndarray, value_matrix: np.ndarray) -> FunctionClass:
    """Class of explicit tables: row k of ``value_matrix`` defines hypothesis k."""
    points = np.asarray(points, dtype=np.float64)
    if points.ndim == 1:
        points = points[:, None]
    value_matrix = np.atleast_2d(np.asarray(value_matrix, dtype=np.float64))
    if value_matrix.shape[1] != points.shape[0]:
        raise InvalidInputError("value matrix needs one column per point")
    if value_matrix.shape[0] == 0:
        raise EmptyClassError("table class needs at least one hypothesis")
    hyps = tuple(TableHypothesis(points, row) for row in value_matrix)
    return FunctionClass(
        hyps,
        points.shape[1],
        (float(value_matrix.min()), float(value_matrix.max())),
        math.inf,
        kind="table",
    )


def load_table_class(path) -> FunctionClass:
    """Read a table class from CSV: columns x_1..x_d then f_1..f_K, one row per point."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise InvalidInputError("table CSV needs a header and at least one point")
    header = rows[0]
    d = sum(1 for name in header if name.strip().startswith("x_"))
    k = len(header) - d
    if d < 1 or k < 1:
        raise InvalidInputError("table CSV header must name x_* then f_* columns")
    data = np.array([[float(v) for v in row] for row in rows[1:]])
    return table_class(data[:, :d], data[:, d:].T)
