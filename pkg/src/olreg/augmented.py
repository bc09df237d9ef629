"""Learners that consume a forecasting predictor of the example stream.

The restart learner runs a fresh transductive learner on the predictor's
current forecast suffix and restarts whenever the standing forecast misses a
new observation (exact miss or epsilon-ball miss, depending on how the
predictor is wrapped).  On top of it sit interval partitions with one
restart learner per piece, and hedge-style aggregation over a grid of
partition counts or epsilon thresholds.
"""

from __future__ import annotations

import math

import numpy as np

from .core import EmptyExpertError, InvalidInputError, LossSpec, loss_vector
from .mwa import MultiplicativeWeights


def derive_seed(master, *path):
    """Stable child seed for a nested component; None stays None (nondeterministic)."""
    if master is None:
        return None
    entropy = [int(master)] + [int(p) for p in path]
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


class RestartOnMissLearner:
    """Restart a per-forecast learner every time the predictor misses.

    ``learner_factory(suffix, seed)`` builds a learner for the given forecast
    suffix (shape (n, d), first row is the just-observed example).  The first
    inner learner reuses the master seed unchanged, so a run with a perfect
    predictor is bit-identical to the standalone learner on the true
    sequence under the same seed.
    """

    def __init__(self, predictor, learner_factory, horizon: int, seed=None):
        self.predictor = predictor
        self.factory = learner_factory
        self.horizon = horizon
        self.seed = seed
        self.rounds = 0
        self.restarts = 0
        self._inner = None

    def predict(self, x) -> float:
        if self.rounds >= self.horizon:
            raise InvalidInputError("learner already consumed its whole horizon")
        miss = self.predictor.observe(x)
        if self._inner is None or miss:
            suffix = self.predictor.forecast()[self.rounds:]
            inner_seed = self.seed if self.restarts == 0 else derive_seed(self.seed, self.restarts)
            self._inner = self.factory(suffix, inner_seed)
            self.restarts += 1
        self.rounds += 1
        return self._inner.predict(x)

    def observe(self, y: float) -> None:
        self._inner.observe(y)

    @property
    def predictor_miss_count(self) -> int:
        return self.predictor.miss_count


def interval_partition(horizon: int, pieces: int):
    """Split rounds 0..T-1 at multiples of ceil(T / (pieces + 1)), clipped to T.

    Returns half-open (lo, hi) index pairs; degenerate tail pieces vanish.
    """
    if not 0 <= pieces <= horizon - 1:
        raise InvalidInputError("piece count must lie in [0, T-1]")
    step = math.ceil(horizon / (pieces + 1))
    bounds = [min(j * step, horizon) for j in range(pieces + 1)] + [horizon]
    return [(lo, hi) for lo, hi in zip(bounds, bounds[1:]) if hi > lo]


class IntervalPartitionLearner:
    """One independent restart learner per interval of a fixed partition.

    ``restart_factory(start, length, seed)`` must build a restart learner
    whose predictor is fresh and scoped to the interval's sub-stream.
    """

    def __init__(self, pieces: int, horizon: int, restart_factory, seed=None):
        self.intervals = interval_partition(horizon, pieces)
        self.pieces = pieces
        self.horizon = horizon
        self.restart_factory = restart_factory
        self.seed = seed
        self.rounds = 0
        self._idx = -1
        self._current = None

    def predict(self, x) -> float:
        nxt = self._idx + 1
        if nxt < len(self.intervals) and self.rounds == self.intervals[nxt][0]:
            self._idx = nxt
            lo, hi = self.intervals[nxt]
            self._current = self.restart_factory(lo, hi - lo, derive_seed(self.seed, nxt))
        self.rounds += 1
        return self._current.predict(x)

    def observe(self, y: float) -> None:
        self._current.observe(y)


class MetaHedgeLearner:
    """Multiplicative weights over full online learners as experts."""

    def __init__(self, experts, horizon: int, spec: LossSpec, seed=None, mode: str = "sampled"):
        experts = list(experts)
        if not experts:
            raise EmptyExpertError("meta aggregation needs at least one expert learner")
        self.experts = experts
        self.spec = spec
        self.mwa = MultiplicativeWeights(len(experts), horizon, seed, mode)
        self._preds = None

    def predict(self, x) -> float:
        self._preds = np.array([e.predict(x) for e in self.experts])
        return self.mwa.predict(self._preds)

    def observe(self, y: float) -> None:
        for e in self.experts:
            e.observe(y)
        raw = loss_vector(self.spec, self._preds, float(y))
        self.mwa.update(raw / self.spec.normalization_bound)
        self._preds = None


def partition_grid(horizon: int):
    """Default grid of piece counts: everything up to T-1, powers of two past T=1000."""
    if horizon <= 1000:
        return list(range(horizon))
    grid = [0]
    p = 1
    while p <= horizon - 1:
        grid.append(p)
        p *= 2
    return grid


def partition_grid_learner(
    restart_factory,
    horizon: int,
    spec: LossSpec,
    seed=None,
    grid=None,
    mode: str = "sampled",
) -> MetaHedgeLearner:
    """Hedge over interval-partition learners, one expert per piece count."""
    cs = partition_grid(horizon) if grid is None else sorted({int(c) for c in grid})
    experts = [
        IntervalPartitionLearner(c, horizon, restart_factory, derive_seed(seed, i + 1))
        for i, c in enumerate(cs)
    ]
    learner = MetaHedgeLearner(experts, horizon, spec, derive_seed(seed, 0), mode)
    learner.grid = cs
    return learner


def epsilon_grid(horizon: int, kappa: float = 1.0, floor_exponent: int = -20):
    """Geometric threshold grid {2^i : 2^i < T^kappa}, truncated below at 2^floor."""
    if horizon < 1:
        raise InvalidInputError("horizon must be at least 1")
    cap = float(horizon) ** kappa
    grid = []
    i = floor_exponent
    while 2.0 ** i < cap:
        grid.append(2.0 ** i)
        i += 1
    if not grid:
        raise InvalidInputError("epsilon grid is empty; raise kappa or the horizon")
    return grid


def epsilon_grid_learner(
    expert_factory,
    horizon: int,
    spec: LossSpec,
    seed=None,
    kappa: float = 1.0,
    mode: str = "sampled",
) -> MetaHedgeLearner:
    """Hedge over per-threshold learners built by ``expert_factory(eps, seed)``."""
    grid = epsilon_grid(horizon, kappa)
    experts = [expert_factory(eps, derive_seed(seed, i + 1)) for i, eps in enumerate(grid)]
    learner = MetaHedgeLearner(experts, horizon, spec, derive_seed(seed, 0), mode)
    learner.grid = grid
    return learner
