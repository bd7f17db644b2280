from .classifier import (
    LinearClassifier,
    lda_from_means,
    reconstruct_class_means,
    score_epoch,
    solve_projection,
    train_llp,
    train_supervised,
)
from .selection import best_symbol, posthoc_reanalyze, select_symbol, symbol_scores
from .shrinkage import ScatterMoments, ShrunkCovariance, shrink_average, shrink_covariance, shrink_matrix
from .state import OnlineLLPState, update_state

__all__ = [
    "LinearClassifier",
    "OnlineLLPState",
    "ScatterMoments",
    "ShrunkCovariance",
    "best_symbol",
    "lda_from_means",
    "posthoc_reanalyze",
    "reconstruct_class_means",
    "score_epoch",
    "select_symbol",
    "shrink_average",
    "shrink_covariance",
    "shrink_matrix",
    "solve_projection",
    "symbol_scores",
    "train_llp",
    "train_supervised",
    "update_state",
]
