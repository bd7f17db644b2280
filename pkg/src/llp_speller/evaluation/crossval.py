"""
Chronological Cross-Validation
==============================
Contiguous folds in recording order: each fold is held out once while the
classifier is trained on the remaining ones.
"""

from __future__ import annotations

import logging
from typing import Callable, Optional

import numpy as np

from ..decoder.classifier import LinearClassifier, train_supervised
from ..errors import InsufficientDataError
from .metrics import ScoredSet, auc

logger = logging.getLogger(__name__)

# (train features, train labels, train group tags or None) -> classifier
Trainer = Callable[[np.ndarray, np.ndarray, Optional[np.ndarray]], LinearClassifier]


def supervised_trainer(X: np.ndarray, y: np.ndarray, groups: np.ndarray | None = None) -> LinearClassifier:
    return train_supervised(X, y)


def fold_slices(n: int, k: int) -> list[np.ndarray]:
    if k < 2:
        raise ValueError(f"cross-validation needs k >= 2 folds, got {k}")
    if n < k:
        raise InsufficientDataError(f"{n} epochs cannot be split into {k} folds")
    return [np.asarray(f) for f in np.array_split(np.arange(n), k)]


def fold_aucs(
    features: np.ndarray,
    labels: np.ndarray,
    k: int = 5,
    trainer: Trainer | None = None,
    groups: np.ndarray | None = None,
) -> list[float]:
    """Held-out AUC of every usable fold; single-class folds are skipped."""
    trainer = trainer or supervised_trainer
    X = np.asarray(features, dtype=float)
    y = np.asarray(labels).reshape(-1)
    g = None if groups is None else np.asarray(groups).reshape(-1)
    results: list[float] = []
    for i, test in enumerate(fold_slices(X.shape[0], k)):
        y_test = y[test]
        if np.all(y_test > 0) or np.all(y_test <= 0):
            logger.warning("fold %d holds a single class; skipped", i + 1)
            continue
        train = np.ones(X.shape[0], dtype=bool)
        train[test] = False
        try:
            clf = trainer(X[train], y[train], None if g is None else g[train])
        except InsufficientDataError as exc:
            logger.warning("fold %d cannot be trained (%s); skipped", i + 1, exc)
            continue
        scores = np.asarray(clf.score(X[test]))
        results.append(auc(ScoredSet(scores, y_test)))
    return results


def chronological_cv(
    features: np.ndarray,
    labels: np.ndarray,
    k: int = 5,
    trainer: Trainer | None = None,
    groups: np.ndarray | None = None,
) -> float:
    """Mean held-out AUC over ``k`` contiguous folds."""
    aucs = fold_aucs(features, labels, k=k, trainer=trainer, groups=groups)
    if not aucs:
        raise InsufficientDataError("no fold contained both classes")
    return float(np.mean(aucs))
