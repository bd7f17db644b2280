"""
Shrinkage Covariance
====================
Covariance estimation from running sums with analytic shrinkage towards a
scaled identity ``ν·I`` (``ν`` = mean variance).

The intensity is the ratio of the summed estimation variance of the
sample covariance entries to their summed squared distance from the
target, clipped to [0, 1]. Both terms are computed from moment sums, so
the estimate can be refreshed at any time without revisiting old samples.

Example::

    import numpy as np
    from llp_speller.decoder.shrinkage import ScatterMoments, shrink_covariance

    moments = ScatterMoments.from_samples(np.random.default_rng(0).normal(size=(500, 5)))
    cov = shrink_covariance(moments)
    cov.gamma          # small for well-conditioned data
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionMismatchError, InsufficientDataError

logger = logging.getLogger(__name__)

# Squared Frobenius distances below this count as "sample covariance equals target".
_ZERO_DISTANCE = 1e-300


@dataclass(frozen=True)
class ShrunkCovariance:
    matrix: np.ndarray
    gamma: float
    target_scale: float
    degenerate: bool = False

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dimension(self) -> int:
        return int(self.matrix.shape[0])


@dataclass
class ScatterMoments:
    """
    Running sums over samples ``x``: count, ``Σx``, ``Σxxᵀ`` and the
    fourth-order sums ``Σx_i²``, ``Σx_i²x_j``, ``Σx_i²x_j²`` that the
    shrinkage intensity needs.
    """
    d: int
    n: float = 0.0
    s1: np.ndarray = field(init=False)
    s2: np.ndarray = field(init=False)
    p: np.ndarray = field(init=False)
    r: np.ndarray = field(init=False)
    q: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        self.reset()

    @classmethod
    def from_samples(cls, X: np.ndarray) -> "ScatterMoments":
        X = np.atleast_2d(np.asarray(X, dtype=float))
        moments = cls(d=X.shape[1])
        moments.add(X)
        return moments

    def reset(self) -> None:
        d = self.d
        self.n = 0.0
        self.s1 = np.zeros(d)
        self.s2 = np.zeros((d, d))
        self.p = np.zeros(d)
        self.r = np.zeros((d, d))
        self.q = np.zeros((d, d))

    def add(self, X: np.ndarray) -> None:
        """Add the rows of ``X`` (n × d, or a single d-vector)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.d:
            raise DimensionMismatchError(f"expected {self.d} features, got {X.shape[1]}")
        X2 = X * X
        self.n += X.shape[0]
        self.s1 += X.sum(axis=0)
        self.s2 += X.T @ X
        self.p += X2.sum(axis=0)
        self.r += X2.T @ X
        self.q += X2.T @ X2

    def scale(self, factor: float) -> None:
        self.n *= factor
        for name in ("s1", "s2", "p", "r", "q"):
            getattr(self, name).__imul__(factor)

    @property
    def mean(self) -> np.ndarray:
        if self.n <= 0:
            raise InsufficientDataError("no samples accumulated")
        return self.s1 / self.n

    def covariance(self) -> np.ndarray:
        """Unbiased sample covariance (denominator n - 1)."""
        if self.n < 2:
            raise InsufficientDataError(f"covariance needs at least 2 samples, have {self.n:g}")
        m = self.mean
        c = (self.s2 - self.n * np.outer(m, m)) / (self.n - 1.0)
        return (c + c.T) / 2.0

    def entry_variance(self) -> np.ndarray:
        """Estimated variance of every covariance entry, ``Var(c_ij)``."""
        n = self.n
        c = self.covariance()
        m = self.mean
        mi, mj = m[:, None], m[None, :]
        fourth = (
            self.q
            - 2.0 * mj * self.r
            - 2.0 * mi * self.r.T
            + mj ** 2 * self.p[:, None]
            + mi ** 2 * self.p[None, :]
            + 4.0 * mi * mj * self.s2
            - 2.0 * mi * mj ** 2 * self.s1[:, None]
            - 2.0 * mi ** 2 * mj * self.s1[None, :]
            + n * mi ** 2 * mj ** 2
        )
        spread = fourth - (n - 1.0) ** 2 * c ** 2 / n
        return np.clip(n / (n - 1.0) ** 3 * spread, 0.0, None)


def shrink_matrix(c: np.ndarray, entry_variance: np.ndarray) -> ShrunkCovariance:
    """Shrink ``c`` towards ``ν·I`` given the variance of its entries."""
    c = np.asarray(c, dtype=float)
    d = c.shape[0]
    nu = float(np.trace(c) / d)
    if nu <= 0.0:
        logger.warning("covariance has zero total variance; returning a degenerate estimate")
        return ShrunkCovariance(np.zeros((d, d)), gamma=1.0, target_scale=0.0, degenerate=True)
    target = nu * np.eye(d)
    distance = float(np.sum((c - target) ** 2))
    if distance <= _ZERO_DISTANCE:
        gamma = 1.0
    else:
        gamma = float(np.clip(np.sum(entry_variance) / distance, 0.0, 1.0))
    shrunk = (1.0 - gamma) * c + gamma * target
    logger.debug("shrinkage gamma=%.4f nu=%.4g d=%d", gamma, nu, d)
    return ShrunkCovariance((shrunk + shrunk.T) / 2.0, gamma=gamma, target_scale=nu)


def shrink_covariance(moments: ScatterMoments) -> ShrunkCovariance:
    return shrink_matrix(moments.covariance(), moments.entry_variance())


def shrink_average(a: ScatterMoments, b: ScatterMoments) -> ShrunkCovariance:
    """Shrink the unweighted average of two covariances (e.g. class-wise)."""
    if a.d != b.d:
        raise DimensionMismatchError(f"moment dimensions differ: {a.d} vs {b.d}")
    c = (a.covariance() + b.covariance()) / 2.0
    var = (a.entry_variance() + b.entry_variance()) / 4.0
    return shrink_matrix(c, var)
