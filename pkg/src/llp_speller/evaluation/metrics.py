"""
Metrics
=======
Ranking AUC, per-feature signed r², spelling accuracy and the square-loss
decomposition check.

Example::

    from llp_speller.evaluation import ScoredSet, auc

    auc(ScoredSet([0.9, 0.8, 0.3], [1, -1, 1]))      # 0.5
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats

from ..errors import DimensionMismatchError, InsufficientDataError

# Characters spelled before the online decoder is considered warmed up.
RAMP_UP_CHARACTERS = 7


@dataclass(frozen=True)
class ScoredSet:
    """Classifier outputs with aligned ±1 labels."""
    scores: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        scores = np.array(self.scores, dtype=float).reshape(-1)
        labels = np.where(np.asarray(self.labels).reshape(-1) > 0, 1, -1)
        if scores.shape != labels.shape:
            raise DimensionMismatchError(f"{scores.shape[0]} scores for {labels.shape[0]} labels")
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "labels", labels)

    @property
    def n_targets(self) -> int:
        return int(np.sum(self.labels > 0))

    @property
    def n_non_targets(self) -> int:
        return int(np.sum(self.labels < 0))


def auc(s: ScoredSet) -> float:
    """
    Probability that a random target outscores a random non-target, ties
    counting one half (Mann-Whitney U over both class sizes).
    """
    n_pos, n_neg = s.n_targets, s.n_non_targets
    if n_pos == 0 or n_neg == 0:
        raise InsufficientDataError("AUC needs both targets and non-targets")
    ranks = stats.rankdata(s.scores)
    u = float(np.sum(ranks[s.labels > 0])) - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def auc_of(scores: Sequence[float] | np.ndarray, labels: Sequence[int] | np.ndarray) -> float:
    return auc(ScoredSet(np.asarray(scores), np.asarray(labels)))


def signed_r2(features: np.ndarray, labels: Sequence[int] | np.ndarray) -> np.ndarray:
    """``sign(r)·r²`` of the point-biserial correlation, per feature column."""
    X = np.atleast_2d(np.asarray(features, dtype=float))
    if X.shape[0] == 1 and np.asarray(labels).size != 1:
        X = X.T
    y = np.where(np.asarray(labels).reshape(-1) > 0, 1.0, -1.0)
    if X.shape[0] != y.shape[0]:
        raise DimensionMismatchError(f"{X.shape[0]} epochs for {y.shape[0]} labels")
    if np.all(y > 0) or np.all(y < 0):
        raise InsufficientDataError("signed r² needs both classes")
    xc = X - X.mean(axis=0)
    yc = y - y.mean()
    sx = np.sqrt(np.sum(xc ** 2, axis=0))
    sy = float(np.sqrt(np.sum(yc ** 2)))
    with np.errstate(invalid="ignore", divide="ignore"):
        r = (yc @ xc) / (sx * sy)
    r = np.where(sx > 0, r, 0.0)
    r = np.clip(r, -1.0, 1.0)
    return np.sign(r) * r ** 2


@dataclass(frozen=True)
class AccuracyReport:
    n_characters: int
    n_correct: int
    accuracy: float
    post_ramp_accuracy: float | None
    ramp: int = RAMP_UP_CHARACTERS

    def to_dict(self) -> dict[str, float | int | None]:
        return {
            "n_characters": self.n_characters,
            "n_correct": self.n_correct,
            "accuracy": self.accuracy,
            "post_ramp_accuracy": self.post_ramp_accuracy,
            "ramp": self.ramp,
        }


def accuracy_report(
    decisions: Sequence[int], truth: Sequence[int], ramp: int = RAMP_UP_CHARACTERS
) -> AccuracyReport:
    if len(decisions) != len(truth):
        raise DimensionMismatchError(f"{len(decisions)} decisions for {len(truth)} characters")
    hits = np.asarray(decisions) == np.asarray(truth)
    n = int(hits.shape[0])
    post = hits[ramp:]
    return AccuracyReport(
        n_characters=n,
        n_correct=int(hits.sum()),
        accuracy=float(hits.mean()) if n else 0.0,
        post_ramp_accuracy=float(post.mean()) if post.size else None,
        ramp=ramp,
    )


def character_accuracy(decisions: Sequence[int], truth: Sequence[int]) -> float:
    """Fraction of characters decoded exactly."""
    return accuracy_report(decisions, truth).accuracy


def square_loss_identity(
    w: np.ndarray | float, features: np.ndarray, labels: Sequence[int] | np.ndarray
) -> tuple[float, float]:
    """
    Squared loss of ``wᵀx`` against ±1 labels, computed directly and via the
    class sums. The two agree up to rounding for any input.
    """
    X = np.asarray(features, dtype=float)
    w_arr = np.atleast_1d(np.asarray(w, dtype=float))
    if X.ndim == 1:
        X = X.reshape(-1, 1) if w_arr.shape[0] == 1 else X.reshape(1, -1)
    y = np.where(np.asarray(labels).reshape(-1) > 0, 1.0, -1.0)
    if X.shape != (y.shape[0], w_arr.shape[0]):
        raise DimensionMismatchError(
            f"features {X.shape} do not match {y.shape[0]} labels and d={w_arr.shape[0]}"
        )
    f = X @ w_arr
    direct = float(np.sum((f - y) ** 2))
    sum_plus = X[y > 0].sum(axis=0)
    sum_minus = X[y < 0].sum(axis=0)
    decomposed = float(np.sum(f ** 2 + 1.0) - 2.0 * w_arr @ (sum_plus - sum_minus))
    return direct, decomposed
