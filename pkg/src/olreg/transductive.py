"""Transductive online regression: aggregation over a cover of the class.

When the whole example sequence is known up front, a finite class induces a
finite set of prediction traces.  The learner builds an l-infinity cover of
those traces at radius alpha (alpha = 0 keeps the traces themselves) and runs
multiplicative weights over the cover elements as experts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .complexity import covering_number_linf
from .core import EmptyExpertError, InvalidInputError, LossSpec, loss_vector
from .mwa import MultiplicativeWeights


@dataclass(frozen=True)
class ExpertTable:
    """A (K, T) matrix of per-round expert predictions plus its provenance."""

    predictions: np.ndarray
    provenance: str = "explicit"

    def __post_init__(self):
        preds = np.atleast_2d(np.asarray(self.predictions, dtype=np.float64))
        if preds.shape[0] < 1:
            raise EmptyExpertError("expert table needs at least one row")
        object.__setattr__(self, "predictions", preds)

    @property
    def n_experts(self) -> int:
        return self.predictions.shape[0]

    @property
    def horizon(self) -> int:
        return self.predictions.shape[1]

    def column(self, t: int) -> np.ndarray:
        return self.predictions[:, t]


class _LinearColumns:
    """Lazy expert columns w_k . x_t for big linear classes; never materializes (K, T)."""

    def __init__(self, weight_matrix: np.ndarray, X: np.ndarray, provenance: str):
        self.W = weight_matrix
        self.X = X
        self.provenance = provenance
        self.n_experts = weight_matrix.shape[0]
        self.horizon = X.shape[0]

    def column(self, t: int) -> np.ndarray:
        return self.W @ self.X[t]


LAZY_CELL_THRESHOLD = 2_000_000


def build_expert_table(
    function_class,
    X: np.ndarray,
    alpha: float,
    dedup: bool = True,
    cover_method: str = "auto",
    exact_threshold: int = 20,
):
    """Expert predictions for a known sequence, as traces or a cover.

    alpha = 0: the class traces themselves, deduplicated unless ``dedup`` is
    off (aggregating over raw hypotheses mirrors weighting duplicates by
    multiplicity).  alpha > 0: elements of an l-infinity cover at that radius.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if alpha < 0:
        raise InvalidInputError("cover radius must be nonnegative")
    if alpha == 0:
        if not dedup and function_class.kind == "linear":
            W = function_class.weight_matrix()
            if W.shape[0] * X.shape[0] > LAZY_CELL_THRESHOLD:
                return _LinearColumns(W, X, "class-traces")
            return ExpertTable(W @ X.T, "class-traces")
        traces = function_class.trace_matrix(X)
        if dedup:
            return ExpertTable(np.unique(traces, axis=0), "deduplicated-traces")
        return ExpertTable(traces, "class-traces")
    cover = covering_number_linf(
        function_class, X, alpha, exact_threshold=exact_threshold, method=cover_method
    )
    provenance = f"cover(alpha={alpha}, exact={cover.exact})"
    return ExpertTable(cover.centers, provenance)


class TransductiveLearner:
    """Multiplicative weights over cover experts on a known example sequence.

    Labels arrive strictly one round at a time through ``observe``; nothing
    here can touch a label before its round.
    """

    def __init__(
        self,
        table,
        spec: LossSpec,
        seed=None,
        mode: str = "sampled",
    ):
        self.table = table
        self.spec = spec
        self.mwa = MultiplicativeWeights(table.n_experts, table.horizon, seed, mode)
        self.round = 0
        self._current = None

    @classmethod
    def from_class(
        cls,
        function_class,
        X: np.ndarray,
        alpha: float,
        spec: LossSpec,
        seed=None,
        mode: str = "sampled",
        dedup: bool = True,
        cover_method: str = "auto",
    ) -> "TransductiveLearner":
        table = build_expert_table(function_class, X, alpha, dedup, cover_method)
        return cls(table, spec, seed, mode)

    @property
    def n_experts(self) -> int:
        return self.table.n_experts

    def predict(self, x=None) -> float:
        if self.round >= self.table.horizon:
            raise InvalidInputError("learner already consumed its whole horizon")
        self._current = self.table.column(self.round)
        return self.mwa.predict(self._current)

    def observe(self, y: float) -> None:
        if self._current is None:
            raise InvalidInputError("observe must follow a prediction")
        raw = loss_vector(self.spec, self._current, float(y))
        self.mwa.update(raw / self.spec.normalization_bound)
        self._current = None
        self.round += 1


def transductive_regret_bound(
    horizon: int,
    n_experts: int,
    alpha: float,
    loss_lipschitz: float,
) -> float:
    """alpha * L * T + sqrt(T ln K / 2): approximation cost plus aggregation cost."""
    if horizon < 1 or n_experts < 1:
        raise InvalidInputError("need a positive horizon and expert count")
    return alpha * loss_lipschitz * horizon + math.sqrt(
        horizon * math.log(n_experts) / 2.0
    )
