"""Shared domain types, loss functions, and regret accounting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np


class InvalidInputError(ValueError):
    """An operation received arguments outside its contract."""


class EmptyClassError(ValueError):
    """A hypothesis class with no members was used where one is required."""


class EmptyExpertError(ValueError):
    """An aggregator was asked to run with zero experts."""


class ContractViolationError(ValueError):
    """A normalized loss left the unit interval."""


def _as_float_vector(x) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if arr.ndim != 1:
        raise InvalidInputError(f"expected a flat feature vector, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class LabeledExample:
    """One (x, y) pair with a d-dimensional feature vector and a real label."""

    x: np.ndarray
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", _as_float_vector(self.x))
        object.__setattr__(self, "y", float(self.y))
        if not np.all(np.isfinite(self.x)) or not math.isfinite(self.y):
            raise InvalidInputError("example coordinates and label must be finite")
        self.x.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.x.shape[0]


@dataclass(frozen=True)
class ExampleSequence:
    """A length-T sequence of labeled examples sharing one feature dimension.

    Stored columnar: ``x`` has shape (T, d) and ``y`` shape (T,).
    """

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        if x.ndim == 1:
            x = x[:, None]
        y = np.asarray(self.y, dtype=np.float64).ravel()
        if x.ndim != 2:
            raise InvalidInputError(f"examples must form a (T, d) array, got shape {x.shape}")
        if x.shape[0] < 1:
            raise InvalidInputError("a sequence needs at least one round")
        if x.shape[0] != y.shape[0]:
            raise InvalidInputError(
                f"got {x.shape[0]} examples but {y.shape[0]} labels"
            )
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise InvalidInputError("examples and labels must be finite")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def horizon(self) -> int:
        return self.x.shape[0]

    @property
    def dim(self) -> int:
        return self.x.shape[1]

    def __len__(self) -> int:
        return self.horizon

    def __iter__(self) -> Iterator[LabeledExample]:
        for t in range(self.horizon):
            yield LabeledExample(self.x[t], self.y[t])


@dataclass(frozen=True)
class LossSpec:
    """Loss configuration shared by learners and regret accounting.

    ``normalization_bound`` is the constant B that rescales raw losses into
    [0, 1] before any weight update; reported losses stay in raw units.
    For the builtin absolute loss the Lipschitz constant is 1.
    """

    kind: str = "l1"
    lipschitz_constant: float = 1.0
    normalization_bound: float = 1.0
    fn: Callable[[float, float], float] | None = None

    def __post_init__(self):
        if self.kind not in ("l1", "custom"):
            raise InvalidInputError(f"unknown loss kind {self.kind!r}")
        if self.kind == "custom" and self.fn is None:
            raise InvalidInputError("custom loss needs an explicit callable")
        if self.kind == "l1" and self.fn is not None:
            raise InvalidInputError("builtin absolute loss takes no callable")
        if self.normalization_bound <= 0:
            raise InvalidInputError("normalization bound must be positive")
        if self.lipschitz_constant < 0:
            raise InvalidInputError("Lipschitz constant must be nonnegative")


def loss(spec: LossSpec, y_hat: float, y: float) -> float:
    """Raw (unnormalized) loss of predicting ``y_hat`` against label ``y``."""
    if not (math.isfinite(y_hat) and math.isfinite(y)):
        raise InvalidInputError("loss arguments must be finite")
    if spec.kind == "l1":
        return abs(y_hat - y)
    value = float(spec.fn(y_hat, y))
    if not math.isfinite(value) or value < 0:
        raise InvalidInputError("custom loss must return a finite nonnegative value")
    return value


def loss_vector(spec: LossSpec, predictions: np.ndarray, y: float) -> np.ndarray:
    """Vectorized ``loss`` over one prediction per expert."""
    predictions = np.asarray(predictions, dtype=np.float64)
    if spec.kind == "l1":
        return np.abs(predictions - y)
    return np.array([loss(spec, float(p), y) for p in predictions])


@dataclass(frozen=True)
class RegretReport:
    """Per-round cumulative losses of a learner and of the best comparator.

    ``regret`` is always the elementwise difference of the two curves.
    """

    cumulative_loss: np.ndarray
    cumulative_best: np.ndarray
    regret: np.ndarray = field(default=None)
    seed: int | None = None
    repetitions: int = 1

    def __post_init__(self):
        cl = np.asarray(self.cumulative_loss, dtype=np.float64)
        cb = np.asarray(self.cumulative_best, dtype=np.float64)
        if cl.shape != cb.shape:
            raise InvalidInputError("loss curves must share a horizon")
        object.__setattr__(self, "cumulative_loss", cl)
        object.__setattr__(self, "cumulative_best", cb)
        object.__setattr__(self, "regret", cl - cb)

    @property
    def final_regret(self) -> float:
        return float(self.regret[-1])


def best_in_class_loss(function_class, seq: ExampleSequence, spec: LossSpec):
    """Exact minimum cumulative loss over a finite class, with its argmin.

    Ties break toward the lowest hypothesis index.  Raises ``EmptyClassError``
    on a class with no members.
    """
    if len(function_class) == 0:
        raise EmptyClassError("cannot take a minimum over an empty class")
    totals = class_cumulative_losses(function_class, seq, spec)[:, -1]
    best = int(np.argmin(totals))
    return float(totals[best]), best


def class_cumulative_losses(function_class, seq: ExampleSequence, spec: LossSpec) -> np.ndarray:
    """(K, T) matrix of running cumulative losses, one row per hypothesis."""
    traces = function_class.trace_matrix(seq.x)
    if spec.kind == "l1":
        per_round = np.abs(traces - seq.y[None, :])
    else:
        per_round = np.empty_like(traces)
        for t in range(seq.horizon):
            per_round[:, t] = loss_vector(spec, traces[:, t], seq.y[t])
    return np.cumsum(per_round, axis=1)


def accumulate_regret(
    learner_losses: np.ndarray,
    function_class,
    seq: ExampleSequence,
    spec: LossSpec,
    baseline: str = "final-minimizer",
    seed: int | None = None,
) -> RegretReport:
    """Regret curve of realized per-round losses against a class baseline.

    ``baseline="final-minimizer"`` tracks the prefix loss of the hypothesis
    that is optimal at the final round; ``"prefix-best"`` recomputes the
    minimum at every prefix (a weakly lower curve).
    """
    learner_losses = np.asarray(learner_losses, dtype=np.float64)
    if learner_losses.shape[0] != seq.horizon:
        raise InvalidInputError("learner losses must cover every round")
    cum_class = class_cumulative_losses(function_class, seq, spec)
    if baseline == "final-minimizer":
        winner = int(np.argmin(cum_class[:, -1]))
        cum_best = cum_class[winner]
    elif baseline == "prefix-best":
        cum_best = cum_class.min(axis=0)
    else:
        raise InvalidInputError(f"unknown baseline {baseline!r}")
    return RegretReport(np.cumsum(learner_losses), cum_best, seed=seed)


def run_online(learner, seq: ExampleSequence, spec: LossSpec) -> np.ndarray:
    """Drive a predict/observe learner through a sequence, one round at a time.

    The learner sees x_t, commits to a prediction, and only then receives y_t,
    so it can never peek at current or future labels.
    """
    realized = np.empty(seq.horizon)
    for t in range(seq.horizon):
        y_hat = learner.predict(seq.x[t])
        realized[t] = loss(spec, y_hat, seq.y[t])
        learner.observe(seq.y[t])
    return realized
