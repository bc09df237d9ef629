"""Synthetic example streams and their CSV interchange format."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .core import InvalidInputError

SPECTRAL_RADIUS = 0.999


@dataclass(frozen=True)
class SparseLdsStream:
    x: np.ndarray
    transition: np.ndarray
    support: tuple


def iterate_linear_system(transition: np.ndarray, x1: np.ndarray, horizon: int) -> np.ndarray:
    """Roll x_{t+1} = A x_t forward, one multiplication per step."""
    d = x1.shape[0]
    out = np.zeros((horizon, d))
    out[0] = x1
    for t in range(1, horizon):
        out[t] = transition @ out[t - 1]
    return out


def gen_lds_sparse(d: int, c: int, horizon: int, seed=None) -> SparseLdsStream:
    """Stable linear system on a random size-c support of d coordinates.

    The transition block is standard normal on the support, rescaled to
    spectral radius ``SPECTRAL_RADIUS``; x_1 is uniform on [0, 1] over the
    support and zero elsewhere.  Off-support coordinates stay exactly zero
    forever.
    """
    if not (1 <= c <= d):
        raise InvalidInputError("need 1 <= c <= d")
    if horizon < 1:
        raise InvalidInputError("horizon must be at least 1")
    rng = np.random.default_rng(seed)
    support = np.sort(rng.choice(d, size=c, replace=False))
    while True:
        block = rng.standard_normal((c, c))
        radius = np.abs(np.linalg.eigvals(block)).max()
        if radius > 0:
            break
    block *= SPECTRAL_RADIUS / radius
    transition = np.zeros((d, d))
    transition[np.ix_(support, support)] = block
    x1 = np.zeros(d)
    x1[support] = rng.uniform(0.0, 1.0, size=c)
    x = iterate_linear_system(transition, x1, horizon)
    return SparseLdsStream(x, transition, tuple(int(i) for i in support))


def label_with_noise(x: np.ndarray, target, noise_std: float, seed=None) -> np.ndarray:
    """Labels f(x_t) + N(0, noise_std^2); labels are never clipped."""
    if noise_std < 0:
        raise InvalidInputError("noise level must be nonnegative")
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    clean = target.batch(x)
    rng = np.random.default_rng(seed)
    return clean + rng.normal(0.0, noise_std, size=x.shape[0])


@dataclass(frozen=True)
class HardStream:
    x: np.ndarray
    y: np.ndarray
    alpha: float
    copies: int


def gen_rademacher_hard(certificate, horizon: int, seed=None) -> HardStream:
    """Lower-bound stream: each certified shattered point repeated in a block.

    With m certified points, each is emitted floor(T / m) times consecutively
    and labels are independent uniform signs in {-1, +1}; the emitted length
    is m * floor(T / m) (all of T when m divides it).
    """
    points = np.atleast_2d(np.asarray(certificate.points, dtype=np.float64))
    m = points.shape[0]
    copies = horizon // m
    if copies < 1:
        raise InvalidInputError("horizon shorter than the certified point set")
    x = np.repeat(points, copies, axis=0)
    rng = np.random.default_rng(seed)
    y = rng.integers(0, 2, size=m * copies) * 2.0 - 1.0
    return HardStream(x, y, float(certificate.alpha), copies)


def map_labels_affine(y: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Affine map of {-1, +1} labels onto [lo, hi]."""
    if hi <= lo:
        raise InvalidInputError("label range must be nondegenerate")
    y = np.asarray(y, dtype=np.float64)
    return lo + (y + 1.0) * (hi - lo) / 2.0


def write_stream_csv(path, x: np.ndarray, y: np.ndarray) -> None:
    """Write a labeled stream as CSV with header t, x_1..x_d, y."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape[0] != y.shape[0]:
        raise InvalidInputError("one label per example required")
    d = x.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"x_{i + 1}" for i in range(d)] + ["y"])
        for t in range(x.shape[0]):
            writer.writerow([t + 1] + [repr(float(v)) for v in x[t]] + [repr(float(y[t]))])


def read_stream_csv(path):
    """Inverse of ``write_stream_csv``; returns (x, y) arrays."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise InvalidInputError("stream CSV needs a header and at least one row")
    header = rows[0]
    if header[0] != "t" or header[-1] != "y":
        raise InvalidInputError("stream CSV header must be t, x_1..x_d, y")
    data = np.array([[float(v) for v in row] for row in rows[1:]])
    return data[:, 1:-1], data[:, -1]
