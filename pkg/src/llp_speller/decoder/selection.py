"""
Symbol Selection
================
Turn classifier scores of one trial into a spelled symbol: every
selectable cell collects the scores of the stimuli that lit it, and the
largest sum wins. Blank cells never win. Ties go to the lowest symbol id.
"""

from __future__ import annotations

import logging
from typing import Sequence, Union

import numpy as np

from ..errors import DimensionMismatchError
from ..models.sequence import SymbolGrid, Trial
from ..models.signal import FeatureVector
from .classifier import LinearClassifier

logger = logging.getLogger(__name__)

Epochs = Union[np.ndarray, Sequence[FeatureVector]]
TrialEvidence = tuple[Trial, Epochs]


def symbol_scores(
    c: LinearClassifier, trial: Trial, epochs: Epochs, grid: SymbolGrid | None = None
) -> np.ndarray:
    """Summed score per grid cell (blanks included) for one trial."""
    grid = grid or SymbolGrid.speller()
    scores = np.asarray(c.score(epochs), dtype=float).reshape(-1)
    if scores.shape[0] != len(trial):
        raise DimensionMismatchError(
            f"{scores.shape[0]} epochs for a trial of {len(trial)} stimuli"
        )
    return scores @ trial.membership(grid.n_cells).astype(float)


def best_symbol(cell_scores: np.ndarray, grid: SymbolGrid) -> int:
    selectable = np.asarray(grid.selectable, dtype=int)
    return int(selectable[int(np.argmax(cell_scores[selectable]))])


def select_symbol(
    c: LinearClassifier,
    trial: Trial | Sequence[TrialEvidence],
    epochs: Epochs | None = None,
    grid: SymbolGrid | None = None,
) -> int:
    """
    Spelled symbol for one character.

    Pass ``(trial, epochs)`` for a single trial, or a list of
    ``(trial, epochs)`` pairs when a character spans several trials; their
    per-cell sums are added before the argmax.
    """
    grid = grid or SymbolGrid.speller()
    if isinstance(trial, Trial):
        if epochs is None:
            raise ValueError("epochs are required when a single trial is given")
        evidence: Sequence[TrialEvidence] = [(trial, epochs)]
    else:
        evidence = trial
    total = np.zeros(grid.n_cells)
    for t, e in evidence:
        total += symbol_scores(c, t, e, grid)
    return best_symbol(total, grid)


def posthoc_reanalyze(
    c: LinearClassifier,
    history: Sequence[TrialEvidence | Sequence[TrialEvidence]],
    grid: SymbolGrid | None = None,
) -> list[int]:
    """Re-decode every past character with the current classifier."""
    decisions: list[int] = []
    for item in history:
        if isinstance(item, tuple) and len(item) == 2 and isinstance(item[0], Trial):
            decisions.append(select_symbol(c, item[0], item[1], grid=grid))
        else:
            decisions.append(select_symbol(c, list(item), grid=grid))  # type: ignore[arg-type]
    logger.debug("re-analysed %d characters", len(decisions))
    return decisions
