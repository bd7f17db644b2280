"""
Linear Classifier
=================
Training of the projection ``w = Σ⁻¹(µ₊ − µ₋)`` either from group
statistics and the mixing matrix (LLP), or from labelled epochs
(shrinkage LDA baseline), plus scoring ``f(x) = wᵀx``.

There is no bias term: every consumer compares scores of the same
classifier, where a constant offset cancels.

Example::

    from llp_speller.decoder import OnlineLLPState, train_llp
    from llp_speller.models.mixing import MixingMatrix

    clf = train_llp(state, MixingMatrix.speller())
    clf.score(features)          # one value per epoch
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from scipy import linalg

from ..errors import DimensionMismatchError, InsufficientDataError
from ..mixing.mean_map import pseudoinverse, reconstruct_means
from ..models.mixing import ClassMeans, MixingMatrix
from ..models.session import ClassifierSnapshot
from ..models.signal import FeatureVector
from .shrinkage import ScatterMoments, ShrunkCovariance, shrink_average, shrink_covariance
from .state import OnlineLLPState, _as_matrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinearClassifier:
    w: np.ndarray
    gamma: float | None = None
    metadata: dict[str, str | int | float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        w = np.array(self.w, dtype=float).reshape(-1)
        if not np.all(np.isfinite(w)):
            raise ValueError("classifier weights must be finite")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @property
    def d(self) -> int:
        return int(self.w.shape[0])

    def score(self, X: np.ndarray | FeatureVector | Sequence[FeatureVector]) -> np.ndarray | float:
        """``wᵀx`` for one vector (returns float) or each row of a matrix."""
        if isinstance(X, FeatureVector) or (isinstance(X, np.ndarray) and X.ndim == 1):
            return score_epoch(self, X)
        M = _as_matrix(X)
        if M.shape[1] != self.d:
            raise DimensionMismatchError(f"classifier has d={self.d}, features have {M.shape[1]}")
        return M @ self.w

    def to_snapshot(self) -> ClassifierSnapshot:
        return ClassifierSnapshot(
            w=tuple(float(v) for v in self.w),
            gamma=self.gamma,
            d=self.d,
            metadata=dict(self.metadata),
        )

    @classmethod
    def from_snapshot(cls, snap: ClassifierSnapshot) -> "LinearClassifier":
        return cls(np.asarray(snap.w), gamma=snap.gamma, metadata=dict(snap.metadata))


def score_epoch(c: LinearClassifier, x: FeatureVector | np.ndarray | Sequence[float]) -> float:
    v = np.asarray(x, dtype=float).reshape(-1)
    if v.shape[0] != c.d:
        raise DimensionMismatchError(f"classifier has d={c.d}, epoch has {v.shape[0]} features")
    return float(c.w @ v)


def solve_projection(cov: ShrunkCovariance, difference: np.ndarray) -> np.ndarray:
    """``Σ⁻¹ · diff`` via a Cholesky factorization."""
    if cov.degenerate:
        raise InsufficientDataError("covariance estimate is degenerate (no variance in the data)")
    try:
        factor = linalg.cho_factor(cov.matrix, lower=True)
    except linalg.LinAlgError as exc:
        raise InsufficientDataError(f"covariance is not positive definite: {exc}") from exc
    return np.asarray(linalg.cho_solve(factor, np.asarray(difference, dtype=float)))


def lda_from_means(
    cov: ShrunkCovariance, means: ClassMeans, metadata: dict[str, str | int | float] | None = None
) -> LinearClassifier:
    if means.dimension != cov.dimension:
        raise DimensionMismatchError(
            f"means have d={means.dimension}, covariance d={cov.dimension}"
        )
    w = solve_projection(cov, means.difference)
    return LinearClassifier(w, gamma=cov.gamma, metadata=dict(metadata or {}))


def reconstruct_class_means(s: OnlineLLPState, m: MixingMatrix) -> ClassMeans:
    if m.n_groups != s.n_groups:
        raise DimensionMismatchError(
            f"mixing matrix has {m.n_groups} groups, state tracks {s.n_groups}"
        )
    return reconstruct_means(pseudoinverse(m), s.group_means())


def train_llp(s: OnlineLLPState, m: MixingMatrix) -> LinearClassifier:
    """Classifier from group means and pooled covariance only."""
    means = reconstruct_class_means(s, m)
    cov = s.pooled_covariance()
    clf = lda_from_means(
        cov, means, {"method": "llp", "n_epochs": round(s.total_count, 6), "mixing": m.label or ""}
    )
    logger.debug("trained LLP classifier on %.0f epochs (gamma=%.3f)", s.total_count, cov.gamma)
    return clf


def train_supervised(
    features: np.ndarray | Sequence[FeatureVector],
    labels: Sequence[int] | np.ndarray,
    covariance: Literal["classwise", "pooled"] = "classwise",
) -> LinearClassifier:
    """
    Shrinkage LDA with label information.

    ``classwise`` averages the two class covariances and shrinks the
    average; ``pooled`` shrinks the covariance of all epochs together.
    """
    X = _as_matrix(features)
    y = np.asarray(labels).reshape(-1)
    if X.shape[0] != y.shape[0]:
        raise DimensionMismatchError(f"{X.shape[0]} epochs but {y.shape[0]} labels")
    pos, neg = X[y > 0], X[y <= 0]
    if pos.shape[0] == 0 or neg.shape[0] == 0:
        raise InsufficientDataError("supervised training needs both target and non-target epochs")
    means = ClassMeans(pos.mean(axis=0), neg.mean(axis=0))
    if covariance == "classwise":
        cov = shrink_average(ScatterMoments.from_samples(pos), ScatterMoments.from_samples(neg))
    elif covariance == "pooled":
        cov = shrink_covariance(ScatterMoments.from_samples(X))
    else:
        raise ValueError(f"unknown covariance mode {covariance!r}")
    return lda_from_means(cov, means, {"method": "supervised", "covariance": covariance})
