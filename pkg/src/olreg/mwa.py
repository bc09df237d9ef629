"""Multiplicative weights aggregation over a finite expert set.

Weights live in log space so long runs cannot underflow.  The learning rate
is sqrt(8 ln K / T) for K experts over a known horizon T, which yields a
cumulative expected regret of at most sqrt(T ln K / 2) when per-round losses
are normalized to [0, 1].
"""

from __future__ import annotations

import math

import numpy as np

from .core import ContractViolationError, EmptyExpertError, InvalidInputError

LOSS_RANGE_SLACK = 1e-12


def learning_rate(n_experts: int, horizon: int) -> float:
    """Tuned rate sqrt(8 ln K / T); zero for a single expert."""
    if n_experts < 1:
        raise EmptyExpertError("need at least one expert")
    if horizon < 1:
        raise InvalidInputError("horizon must be at least 1")
    if n_experts == 1:
        return 0.0
    return math.sqrt(8.0 * math.log(n_experts) / horizon)


def regret_bound(n_experts: int, horizon: int) -> float:
    """Worst-case expected regret sqrt(T ln K / 2) under [0, 1] losses."""
    if n_experts < 1:
        raise EmptyExpertError("need at least one expert")
    return math.sqrt(horizon * math.log(n_experts) / 2.0)


class MultiplicativeWeights:
    """Exponentially weighted aggregation with sampled or averaged output.

    ``mode="sampled"`` draws one expert per round from the current weight
    distribution (fresh draw every round); ``mode="averaged"`` outputs the
    weighted mean prediction, which inherits the same regret bound for
    convex losses.
    """

    def __init__(self, n_experts: int, horizon: int, seed=None, mode: str = "sampled"):
        if mode not in ("sampled", "averaged"):
            raise InvalidInputError(f"unknown aggregation mode {mode!r}")
        self.eta = learning_rate(n_experts, horizon)
        self.n_experts = n_experts
        self.horizon = horizon
        self.mode = mode
        self.round = 0
        self.log_weights = np.zeros(n_experts)
        self._rng = np.random.default_rng(seed)

    def probabilities(self) -> np.ndarray:
        shifted = self.log_weights - self.log_weights.max()
        w = np.exp(shifted)
        return w / w.sum()

    def predict(self, expert_predictions: np.ndarray) -> float:
        preds = np.asarray(expert_predictions, dtype=np.float64)
        if preds.shape != (self.n_experts,):
            raise InvalidInputError(
                f"expected {self.n_experts} expert predictions, got shape {preds.shape}"
            )
        p = self.probabilities()
        if self.mode == "sampled":
            cdf = np.cumsum(p)
            k = np.searchsorted(cdf, self._rng.random(), side="right")
            return float(preds[min(int(k), self.n_experts - 1)])
        return float(p @ preds)

    def update(self, normalized_losses: np.ndarray) -> None:
        """Apply one round of losses, each already rescaled into [0, 1]."""
        losses = np.asarray(normalized_losses, dtype=np.float64)
        if losses.shape != (self.n_experts,):
            raise InvalidInputError(
                f"expected {self.n_experts} losses, got shape {losses.shape}"
            )
        if np.any(losses < -LOSS_RANGE_SLACK) or np.any(losses > 1.0 + LOSS_RANGE_SLACK):
            raise ContractViolationError(
                f"normalized losses must lie in [0, 1], got range "
                f"[{losses.min()}, {losses.max()}]"
            )
        losses = np.clip(losses, 0.0, 1.0)
        self.log_weights -= self.eta * losses
        self.log_weights -= self.log_weights.max()
        self.round += 1


def hedge_weight_trajectory(loss_matrix: np.ndarray, horizon: int | None = None) -> np.ndarray:
    """(T, K) matrix of pre-update weight distributions for a fixed loss table.

    The weight path of multiplicative weights depends only on the expert
    losses, never on which expert a sampled run happens to draw, so one pass
    serves any number of sampled replicas.
    """
    losses = np.asarray(loss_matrix, dtype=np.float64)
    n_experts, T = losses.shape
    eta = learning_rate(n_experts, horizon if horizon is not None else T)
    probs = np.empty((T, n_experts))
    log_w = np.zeros(n_experts)
    for t in range(T):
        shifted = np.exp(log_w - log_w.max())
        probs[t] = shifted / shifted.sum()
        log_w -= eta * losses[:, t]
        log_w -= log_w.max()
    return probs


def sampled_loss_ensemble(
    loss_matrix: np.ndarray,
    n_runs: int,
    seed=None,
    horizon: int | None = None,
) -> np.ndarray:
    """Total losses of ``n_runs`` independent sampled-mode runs, vectorized.

    Distributionally identical to driving ``n_runs`` separate
    ``MultiplicativeWeights`` instances over the same loss table, because the
    weight trajectory is shared and rounds are sampled independently.
    Returns shape (n_runs,).
    """
    losses = np.asarray(loss_matrix, dtype=np.float64)
    n_experts, T = losses.shape
    probs = hedge_weight_trajectory(losses, horizon)
    rng = np.random.default_rng(seed)
    u = rng.random((n_runs, T))
    totals = np.zeros(n_runs)
    for t in range(T):
        cdf = np.cumsum(probs[t])
        picks = np.searchsorted(cdf, u[:, t], side="right").clip(max=n_experts - 1)
        totals += losses[picks, t]
    return totals


def batched_hedge(
    prediction_table: np.ndarray,
    label_draws: np.ndarray,
    normalization_bound: float,
    mode: str = "sampled",
    seed=None,
) -> np.ndarray:
    """Hedge over many label sequences at once, under the absolute loss.

    ``prediction_table`` is (K, T); ``label_draws`` is (n, T), one row per
    independent labeling.  Each row evolves its own weight vector, exactly as
    a standalone run on that labeling would.  Returns the (n,) raw
    cumulative learner losses.
    """
    if mode not in ("sampled", "averaged"):
        raise InvalidInputError(f"unknown aggregation mode {mode!r}")
    table = np.asarray(prediction_table, dtype=np.float64)
    ys = np.asarray(label_draws, dtype=np.float64)
    n_experts, T = table.shape
    n = ys.shape[0]
    eta = learning_rate(n_experts, T)
    rng = np.random.default_rng(seed)
    log_w = np.zeros((n, n_experts))
    totals = np.zeros(n)
    rows = np.arange(n)
    for t in range(T):
        per_expert = np.abs(table[None, :, t] - ys[:, t, None])
        shifted = np.exp(log_w - log_w.max(axis=1, keepdims=True))
        probs = shifted / shifted.sum(axis=1, keepdims=True)
        if mode == "sampled":
            cdf = np.cumsum(probs, axis=1)
            picks = (cdf < rng.random((n, 1))).sum(axis=1).clip(max=n_experts - 1)
            totals += per_expert[rows, picks]
        else:
            totals += np.abs(probs @ table[:, t] - ys[:, t])
        log_w -= eta * (per_expert / normalization_bound)
        log_w -= log_w.max(axis=1, keepdims=True)
    return totals
