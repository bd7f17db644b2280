"""
Online LLP State
================
Running per-group sums and pooled scatter moments for the unsupervised
decoder. The state only ever sees group tags, never labels.

``forgetting`` below 1 turns the estimator into a recency-weighted one:
before every batch update all sums and counts are multiplied by it.

Example::

    state = OnlineLLPState(d=174, n_groups=2)
    state.update_batch(X_trial, trial.groups)       # 68 epochs
    state.group_counts                              # [32., 36.]
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import DimensionMismatchError, InsufficientDataError
from ..models.mixing import GroupMeans
from ..models.signal import FeatureVector
from .shrinkage import ScatterMoments, ShrunkCovariance, shrink_covariance

logger = logging.getLogger(__name__)


def _as_matrix(X: np.ndarray | Sequence[FeatureVector] | Sequence[Sequence[float]]) -> np.ndarray:
    if isinstance(X, np.ndarray):
        return np.atleast_2d(X.astype(float, copy=False))
    return np.atleast_2d(np.vstack([np.asarray(x, dtype=float) for x in X]))


@dataclass
class OnlineLLPState:
    d: int
    n_groups: int = 2
    forgetting: float = 1.0
    group_sums: np.ndarray = field(init=False)
    group_counts: np.ndarray = field(init=False)
    moments: ScatterMoments = field(init=False)

    def __post_init__(self) -> None:
        if self.n_groups < 1:
            raise ValueError(f"n_groups must be >= 1, got {self.n_groups}")
        if not 0.0 < self.forgetting <= 1.0:
            raise ValueError(f"forgetting must lie in (0, 1], got {self.forgetting}")
        self.moments = ScatterMoments(self.d)
        self.reset()

    # ------------------------------------------------------------------
    # Updates
    # ------------------------------------------------------------------

    def reset(self) -> None:
        """Forget everything (start of a new sentence)."""
        self.group_sums = np.zeros((self.n_groups, self.d))
        self.group_counts = np.zeros(self.n_groups)
        self.moments.reset()

    def _check_group(self, group: int) -> int:
        if not 1 <= int(group) <= self.n_groups:
            raise ValueError(f"group {group} outside 1..{self.n_groups}")
        return int(group) - 1

    def update(self, x: FeatureVector | np.ndarray | Sequence[float], group: int) -> "OnlineLLPState":
        """Add one epoch tagged with ``group`` (1-based)."""
        v = np.asarray(x, dtype=float).reshape(-1)
        if v.shape[0] != self.d:
            raise DimensionMismatchError(f"expected {self.d} features, got {v.shape[0]}")
        k = self._check_group(group)
        self.group_sums[k] += v
        self.group_counts[k] += 1.0
        self.moments.add(v)
        return self

    def update_batch(
        self,
        X: np.ndarray | Sequence[FeatureVector],
        groups: Sequence[int] | np.ndarray,
    ) -> "OnlineLLPState":
        """Add a block of epochs, e.g. all epochs of one character."""
        X = _as_matrix(X)
        g = np.asarray(groups, dtype=int).reshape(-1)
        if X.shape[1] != self.d:
            raise DimensionMismatchError(f"expected {self.d} features, got {X.shape[1]}")
        if X.shape[0] != g.shape[0]:
            raise DimensionMismatchError(f"{X.shape[0]} epochs but {g.shape[0]} group tags")
        for tag in np.unique(g):
            self._check_group(int(tag))
        if self.forgetting < 1.0:
            self.group_sums *= self.forgetting
            self.group_counts *= self.forgetting
            self.moments.scale(self.forgetting)
        for k in range(self.n_groups):
            rows = X[g == k + 1]
            self.group_sums[k] += rows.sum(axis=0)
            self.group_counts[k] += rows.shape[0]
        self.moments.add(X)
        logger.debug("state updated with %d epochs, total %.1f", X.shape[0], self.total_count)
        return self

    # ------------------------------------------------------------------
    # Estimates
    # ------------------------------------------------------------------

    @property
    def total_count(self) -> float:
        return float(self.moments.n)

    def group_means(self) -> GroupMeans:
        empty = [k + 1 for k, c in enumerate(self.group_counts) if c <= 0]
        if empty:
            raise InsufficientDataError(f"group(s) {empty} have no epochs yet")
        return GroupMeans(self.group_sums / self.group_counts[:, None], self.group_counts.copy())

    def pooled_covariance(self) -> ShrunkCovariance:
        """Shrunk covariance of all epochs regardless of group."""
        if self.total_count < 2:
            raise InsufficientDataError(
                f"pooled covariance needs at least 2 epochs, have {self.total_count:g}"
            )
        return shrink_covariance(self.moments)


def update_state(
    s: OnlineLLPState, x: FeatureVector | np.ndarray | Sequence[float], group: int
) -> OnlineLLPState:
    return s.update(x, group)
