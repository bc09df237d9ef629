"""Scale-sensitive complexity measures of finite classes on fixed points.

Fat-shattering search is exhaustive over point subsets with witness
coordinates restricted to midpoints of realized values, which is sufficient
for finite classes because margins are piecewise linear in the witness.
Covers are exact (branch and bound set cover) up to a size threshold and
greedy above it, with the result flagged accordingly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import InvalidInputError

MARGIN_TOL = 1e-9


@dataclass(frozen=True)
class ShatteringCertificate:
    """Shattered points, a witness, and one realizing hypothesis per sign pattern."""

    point_indices: tuple
    points: np.ndarray
    witness: np.ndarray
    realizers: dict
    alpha: float


def verify_shattering(cert: ShatteringCertificate, function_class, tol: float = MARGIN_TOL) -> bool:
    """Recheck every margin inequality of a certificate from scratch."""
    m = len(cert.witness)
    if m == 0:
        return False
    for sigma in itertools.product((-1, 1), repeat=m):
        k = cert.realizers.get(sigma)
        if k is None:
            return False
        h = function_class[k]
        for t in range(m):
            margin = sigma[t] * (h.evaluate(cert.points[t]) - cert.witness[t])
            if margin < cert.alpha / 2.0 - tol:
                return False
    return True


@dataclass(frozen=True)
class FatShatteringResult:
    dimension: int
    certificate: ShatteringCertificate | None
    exact: bool


def _coordinate_behaviors(values: np.ndarray, alpha: float):
    """Distinct (witness, above-set, below-set) triples for one coordinate.

    The above/below sets are bitmasks over hypotheses clearing the +/- margin
    at that witness.  Witnesses sweep midpoints of realized value pairs; two
    witnesses inducing the same sets are interchangeable.
    """
    uniq = np.unique(values)
    half = alpha / 2.0
    behaviors = {}
    for u, v in itertools.combinations_with_replacement(uniq, 2):
        w = (u + v) / 2.0
        above = 0
        below = 0
        for k, val in enumerate(values):
            if val - w >= half - MARGIN_TOL:
                above |= 1 << k
            if w - val >= half - MARGIN_TOL:
                below |= 1 << k
        if above and below:
            behaviors.setdefault((above, below), w)
    return [(w, ab[0], ab[1]) for ab, w in behaviors.items()]


def _shatter_subset(trace_cols, alpha: float):
    """Witness + realizers shattering the given trace columns, or None."""
    m = len(trace_cols)
    per_coord = []
    for col in trace_cols:
        b = _coordinate_behaviors(col, alpha)
        if not b:
            return None
        per_coord.append(b)
    patterns = list(itertools.product((-1, 1), repeat=m))
    for combo in itertools.product(*per_coord):
        realizers = {}
        ok = True
        for sigma in patterns:
            feasible = ~0
            for t, s in enumerate(sigma):
                feasible &= combo[t][1] if s == 1 else combo[t][2]
                if not feasible:
                    break
            if not feasible:
                ok = False
                break
            realizers[sigma] = (feasible & -feasible).bit_length() - 1
        if ok:
            witness = np.array([b[0] for b in combo])
            return witness, realizers
    return None


def fat_shattering_dimension(
    function_class,
    candidate_points: np.ndarray,
    alpha: float,
    max_m: int = 12,
) -> FatShatteringResult:
    """Largest subset of the candidate points that the class alpha-shatters.

    Exhaustive over subset sizes m = 1, 2, ... and stops at the first size
    with no shatterable subset (a subset of a shattered set is shattered, so
    failures are monotone).  When the search is cut off at ``max_m`` before
    exhausting larger subsets, the result is only a lower bound and carries
    ``exact=False``.
    """
    if alpha <= 0:
        raise InvalidInputError("shattering width must be positive")
    X = np.asarray(candidate_points, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if n == 0:
        return FatShatteringResult(0, None, True)
    traces = function_class.trace_matrix(X)
    top = min(n, max_m)
    best_cert = None
    dim = 0
    for m in range(1, top + 1):
        found = None
        for subset in itertools.combinations(range(n), m):
            cols = [traces[:, t] for t in subset]
            hit = _shatter_subset(cols, alpha)
            if hit is not None:
                witness, realizers = hit
                found = ShatteringCertificate(
                    point_indices=subset,
                    points=X[list(subset)],
                    witness=witness,
                    realizers=realizers,
                    alpha=alpha,
                )
                break
        if found is None:
            return FatShatteringResult(dim, best_cert, True)
        dim, best_cert = m, found
    exact = top == n
    return FatShatteringResult(dim, best_cert, exact)


@dataclass(frozen=True)
class CoverResult:
    size: int
    centers: np.ndarray
    exact: bool
    alpha: float


def _greedy_cover(coverage: np.ndarray):
    n_traces = coverage.shape[1]
    uncovered = np.ones(n_traces, dtype=bool)
    chosen = []
    while uncovered.any():
        gains = (coverage & uncovered[None, :]).sum(axis=1)
        pick = int(np.argmax(gains))
        if gains[pick] == 0:
            raise InvalidInputError("candidate centers fail to cover some trace")
        chosen.append(pick)
        uncovered &= ~coverage[pick]
    return chosen


def _exact_cover(coverage: np.ndarray, upper: list):
    """Branch-and-bound minimum set cover seeded with a greedy solution."""
    n_cand, n_traces = coverage.shape
    cover_masks = []
    for row in coverage:
        mask = 0
        for t, hit in enumerate(row):
            if hit:
                mask |= 1 << t
        cover_masks.append(mask)
    full = (1 << n_traces) - 1
    by_trace = [[k for k in range(n_cand) if coverage[k, t]] for t in range(n_traces)]
    best = list(upper)

    def dfs(covered: int, chosen: list):
        nonlocal best
        if covered == full:
            if len(chosen) < len(best):
                best = list(chosen)
            return
        if len(chosen) + 1 >= len(best):
            return
        t = next(i for i in range(n_traces) if not covered >> i & 1)
        for k in by_trace[t]:
            chosen.append(k)
            dfs(covered | cover_masks[k], chosen)
            chosen.pop()

    dfs(0, [])
    return best


def covering_number_linf(
    function_class,
    X: np.ndarray,
    alpha: float,
    exact_threshold: int = 20,
    center_policy: str = "midpoint",
    method: str = "auto",
) -> CoverResult:
    """Size of an l-infinity cover of the class traces on the points ``X``.

    ``center_policy="trace"`` draws centers from the traces themselves;
    ``"midpoint"`` (default) adds pairwise midpoints and the min/max envelope
    midpoint.  The minimum is exact when the deduplicated trace count is at
    most ``exact_threshold`` (or ``method="exact"`` forces it); otherwise a
    greedy cover is returned and flagged as an upper bound.
    """
    if alpha < 0:
        raise InvalidInputError("cover radius must be nonnegative")
    if center_policy not in ("trace", "midpoint"):
        raise InvalidInputError(f"unknown center policy {center_policy!r}")
    if method not in ("auto", "exact", "greedy"):
        raise InvalidInputError(f"unknown cover method {method!r}")
    X = np.asarray(X, dtype=np.float64)
    traces = np.unique(function_class.trace_matrix(X), axis=0)
    n_traces = traces.shape[0]
    candidates = [traces]
    if center_policy == "midpoint":
        if n_traces > 1:
            pairs = list(itertools.combinations(range(n_traces), 2))
            i_idx = [i for i, _ in pairs]
            j_idx = [j for _, j in pairs]
            candidates.append((traces[i_idx] + traces[j_idx]) / 2.0)
        candidates.append(((traces.min(axis=0) + traces.max(axis=0)) / 2.0)[None, :])
    cand = np.unique(np.vstack(candidates), axis=0)
    coverage = (
        np.abs(cand[:, None, :] - traces[None, :, :]).max(axis=2) <= alpha + MARGIN_TOL
    )
    greedy = _greedy_cover(coverage)
    use_exact = method == "exact" or (method == "auto" and n_traces <= exact_threshold)
    if use_exact:
        chosen = _exact_cover(coverage, greedy)
        exact = True
    else:
        chosen = greedy
        exact = len(chosen) == 1
    return CoverResult(len(chosen), cand[sorted(chosen)], exact, alpha)


def empirical_rademacher(
    function_class,
    X: np.ndarray,
    samples: int = 1000,
    seed=None,
):
    """Monte-Carlo estimate of E sup_f (1/T) sum_t sigma_t f(x_t), with its standard error.

    The supremum over the finite class is exact by enumeration; only the sign
    draws are sampled.
    """
    if samples < 2:
        raise InvalidInputError("need at least two sign draws for a standard error")
    X = np.asarray(X, dtype=np.float64)
    traces = function_class.trace_matrix(X)
    T = traces.shape[1]
    rng = np.random.default_rng(seed)
    signs = rng.integers(0, 2, size=(samples, T)) * 2 - 1
    sups = (traces @ signs.T).max(axis=0) / T
    return float(sups.mean()), float(sups.std(ddof=1) / math.sqrt(samples))
