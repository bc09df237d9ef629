"""Full-sequence forecasters of the example stream, with mistake accounting.

A predictor observes true examples one round at a time and maintains a
forecast of the entire sequence.  The lazy/consistent wrapper enforces the
two properties learners rely on: the forecast agrees with the observed
prefix (exactly under the zero-one metric, within epsilon under the ball
metric), and the suffix is refreshed only when the standing forecast misses
the newest observation.  Predictors never see labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import InvalidInputError


def euclidean(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)))


class LazyConsistentPredictor:
    """Wrap a raw forecaster so refreshes happen only on misses.

    ``mode="zero-one"`` treats any inequality as a miss; ``mode="eps-ball"``
    treats distance >= epsilon as a miss (same threshold the mistake metric
    and the restart learners use, so accounting lines up exactly).  Within-
    epsilon observations leave the standing forecast untouched.
    """

    def __init__(self, inner, horizon: int, mode: str = "zero-one", epsilon: float | None = None, metric=euclidean):
        if mode not in ("zero-one", "eps-ball"):
            raise InvalidInputError(f"unknown predictor mode {mode!r}")
        if mode == "eps-ball":
            if epsilon is None or epsilon <= 0:
                raise InvalidInputError("eps-ball mode needs a positive epsilon")
        elif epsilon is not None:
            raise InvalidInputError("zero-one mode takes no epsilon")
        self.inner = inner
        self.horizon = horizon
        self.mode = mode
        self.epsilon = epsilon
        self.metric = metric
        self.rounds_seen = 0
        self.miss_flags: list = []
        self._observed: list = []
        self._forecast = None

    def _refresh(self) -> None:
        fresh = np.array(self.inner.forecast(), dtype=np.float64, copy=True)
        if fresh.shape[0] != self.horizon:
            raise InvalidInputError("inner forecaster returned a short forecast")
        t = self.rounds_seen
        fresh[:t] = np.vstack(self._observed)
        self._forecast = fresh

    def observe(self, x) -> bool | None:
        """Feed the next true example; report whether the standing forecast missed it."""
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        if self.rounds_seen >= self.horizon:
            raise InvalidInputError("predictor already saw the whole stream")
        miss = None
        if self.rounds_seen > 0:
            standing = self._forecast[self.rounds_seen]
            if self.mode == "zero-one":
                miss = not np.array_equal(standing, x)
            else:
                miss = self.metric(standing, x) >= self.epsilon
        self._observed.append(x)
        self.rounds_seen += 1
        self.inner.observe(x)
        if miss is None or miss:
            self._refresh()
        elif self.mode == "zero-one":
            self._forecast[self.rounds_seen - 1] = x
        if miss is not None:
            self.miss_flags.append(miss)
        return miss

    def forecast(self) -> np.ndarray:
        """Current forecast of the full sequence, shape (T, d)."""
        if self._forecast is None:
            raise InvalidInputError("forecast requires at least one observation")
        return self._forecast.copy()

    @property
    def miss_count(self) -> int:
        return sum(self.miss_flags)


class SequenceOracle:
    """Raw forecaster that always reports a fixed sequence (the truth, in tests)."""

    def __init__(self, sequence: np.ndarray):
        self.sequence = np.atleast_2d(np.asarray(sequence, dtype=np.float64))

    def observe(self, x) -> None:
        pass

    def forecast(self) -> np.ndarray:
        return self.sequence


class RepeatLastOracle:
    """Forecasts the last observed example for every remaining round."""

    def __init__(self, horizon: int, dim: int):
        self.horizon = horizon
        self.dim = dim
        self._seen: list = []

    def observe(self, x) -> None:
        self._seen.append(np.atleast_1d(np.asarray(x, dtype=np.float64)))

    def forecast(self) -> np.ndarray:
        out = np.zeros((self.horizon, self.dim))
        t = len(self._seen)
        if t:
            out[:t] = np.vstack(self._seen)
            out[t:] = self._seen[-1]
        return out


class LinearSystemOracle:
    """Identifies x_{t+1} = A x_t by least squares on the observed support.

    Forecasts repeat the last observation until ``identification_rounds``
    observations have arrived; afterwards the fitted map is iterated forward
    one step at a time.  A rank-deficient regression falls back to
    repeat-last and sets ``fallback``.
    """

    def __init__(self, horizon: int, dim: int, identification_rounds: int):
        if identification_rounds < 1:
            raise InvalidInputError("need at least one identification round")
        self.horizon = horizon
        self.dim = dim
        self.identification_rounds = identification_rounds
        self.fallback = False
        self._seen: list = []

    def observe(self, x) -> None:
        self._seen.append(np.atleast_1d(np.asarray(x, dtype=np.float64)))

    def _fit(self, support: np.ndarray):
        rows = np.vstack(self._seen)[:, support]
        prev, nxt = rows[:-1], rows[1:]
        s = support.shape[0]
        if np.linalg.matrix_rank(prev) < s:
            return None
        if prev.shape[0] == s:
            return np.linalg.solve(prev, nxt).T
        return np.linalg.lstsq(prev, nxt, rcond=None)[0].T

    def forecast(self) -> np.ndarray:
        out = np.zeros((self.horizon, self.dim))
        t = len(self._seen)
        if t == 0:
            return out
        seen = np.vstack(self._seen)
        out[:t] = seen
        if t >= self.horizon:
            return out
        support = np.flatnonzero(np.any(seen != 0.0, axis=0))
        fitted = None
        if t > self.identification_rounds and support.size:
            fitted = self._fit(support)
        if fitted is None:
            self.fallback = t > self.identification_rounds
            out[t:] = seen[-1]
            return out
        z = seen[-1][support]
        for step in range(t, self.horizon):
            z = fitted @ z
            out[step, support] = z
        return out


class PerturbedOracle:
    """The truth, except scheduled future rounds are pushed off by a fixed distance.

    Used to manufacture predictors with a controlled mistake budget: whenever
    a scheduled round arrives, the standing forecast for it is wrong by
    exactly ``magnitude`` in Euclidean norm.
    """

    def __init__(self, truth: np.ndarray, schedule, magnitude: float, seed=None):
        self.truth = np.atleast_2d(np.asarray(truth, dtype=np.float64))
        horizon, dim = self.truth.shape
        self.magnitude = float(magnitude)
        rng = np.random.default_rng(seed)
        if isinstance(schedule, (int, float)) and not isinstance(schedule, bool):
            rate = float(schedule)
            if not 0.0 <= rate <= 1.0:
                raise InvalidInputError("a mistake rate must lie in [0, 1]")
            rounds = [t for t in range(2, horizon + 1) if rng.random() < rate]
        else:
            rounds = sorted(int(t) for t in schedule)
            if any(t < 2 or t > horizon for t in rounds):
                raise InvalidInputError("scheduled rounds must lie in 2..T")
        self.scheduled = set(rounds)
        directions = rng.standard_normal((horizon, dim))
        norms = np.linalg.norm(directions, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        self._offsets = directions / norms * self.magnitude
        self._seen = 0

    def observe(self, x) -> None:
        self._seen += 1

    def forecast(self) -> np.ndarray:
        out = self.truth.copy()
        for t in self.scheduled:
            if t > self._seen:
                out[t - 1] += self._offsets[t - 1]
        return out


class ShiftedOracle:
    """The truth displaced by a constant Euclidean offset at every future round."""

    def __init__(self, truth: np.ndarray, delta: float):
        self.truth = np.atleast_2d(np.asarray(truth, dtype=np.float64))
        dim = self.truth.shape[1]
        offset = np.zeros(dim)
        offset[0] = float(delta)
        self.offset = offset
        self._seen = 0

    def observe(self, x) -> None:
        self._seen += 1

    def forecast(self) -> np.ndarray:
        out = self.truth.copy()
        out[self._seen:] += self.offset
        return out


def perfect_predictor(truth: np.ndarray, mode: str = "zero-one", epsilon=None) -> LazyConsistentPredictor:
    truth = np.atleast_2d(np.asarray(truth, dtype=np.float64))
    return LazyConsistentPredictor(SequenceOracle(truth), truth.shape[0], mode, epsilon)

def repeat_last_predictor(horizon: int, dim: int, mode: str = "zero-one", epsilon=None) -> LazyConsistentPredictor:
    return LazyConsistentPredictor(RepeatLastOracle(horizon, dim), horizon, mode, epsilon)


def lds_predictor(
    horizon: int,
    dim: int,
    identification_rounds: int,
    mode: str = "zero-one",
    epsilon=None,
) -> LazyConsistentPredictor:
    oracle = LinearSystemOracle(horizon, dim, identification_rounds)
    return LazyConsistentPredictor(oracle, horizon, mode, epsilon)


def corrupted_predictor(
    truth: np.ndarray,
    mistake_schedule,
    corruption_magnitude: float,
    seed=None,
    mode: str = "zero-one",
    epsilon=None,
) -> LazyConsistentPredictor:
    """Forecasts the truth except at scheduled rounds, which miss by a set distance.

    ``mistake_schedule`` is either an iterable of 1-based rounds in 2..T or a
    per-round rate in [0, 1] applied independently to rounds 2..T.
    """
    truth = np.atleast_2d(np.asarray(truth, dtype=np.float64))
    oracle = PerturbedOracle(truth, mistake_schedule, corruption_magnitude, seed)
    return LazyConsistentPredictor(oracle, truth.shape[0], mode, epsilon)


def shifted_predictor(truth: np.ndarray, delta: float, epsilon: float) -> LazyConsistentPredictor:
    """Eps-ball predictor whose future forecasts are all off by exactly ``delta``."""
    truth = np.atleast_2d(np.asarray(truth, dtype=np.float64))
    return LazyConsistentPredictor(ShiftedOracle(truth, delta), truth.shape[0], "eps-ball", epsilon)


@dataclass
class MistakeLog:
    """Pre-observation miss counts of a predictor along one stream."""

    zero_one_flags: np.ndarray
    eps_flags: dict = field(default_factory=dict)

    @property
    def zero_one_count(self) -> int:
        return int(self.zero_one_flags.sum())

    @property
    def eps_ball_counts(self) -> dict:
        return {eps: int(flags.sum()) for eps, flags in self.eps_flags.items()}


def mistake_metrics(predictor, stream: np.ndarray, eps_grid=(), metric=euclidean) -> MistakeLog:
    """Replay a stream through a predictor and count both mistake metrics.

    Round t >= 2 counts a zero-one mistake when the standing forecast entry
    differs from x_t at all, and an eps mistake when its distance reaches
    eps.  Counts are non-increasing in eps by construction.
    """
    stream = np.atleast_2d(np.asarray(stream, dtype=np.float64))
    horizon = stream.shape[0]
    zero_one = np.zeros(horizon, dtype=bool)
    eps_flags = {float(e): np.zeros(horizon, dtype=bool) for e in eps_grid}
    predictor.observe(stream[0])
    for t in range(1, horizon):
        standing = predictor.forecast()[t]
        zero_one[t] = not np.array_equal(standing, stream[t])
        dist = metric(standing, stream[t])
        for eps, flags in eps_flags.items():
            flags[t] = dist >= eps
        predictor.observe(stream[t])
    return MistakeLog(zero_one, eps_flags)
