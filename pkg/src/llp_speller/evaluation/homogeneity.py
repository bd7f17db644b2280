"""
Group Homogeneity Test
======================
Checks whether epochs of one class look the same no matter which sequence
group they were presented in.

Every group-1 epoch of the class is compared with the group-1 average
computed without it and with the group-2 average, after the larger group
has been subsampled to the size of the smaller one. The squared distances,
scaled for the sizes of the two averages, form matched pairs that enter a
two-sided paired t-test. Reports apply a Bonferroni-corrected threshold
over the number of datasets tested.

Example::

    entry = bootstrap_homogeneity(targets_g1, targets_g2, label=1, times_ms=times)
    report = HomogeneityReport(entries=[entry])
    report.significant(entry)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats

from ..errors import DimensionMismatchError, InsufficientDataError
from ..models.signal import Epoch
from ..preprocessing.epochs import interval_mask

logger = logging.getLogger(__name__)

DEFAULT_TEST_WINDOW_MS: tuple[float, float] = (0.0, 700.0)


def _stack(
    epochs: Sequence[Epoch] | np.ndarray,
    times_ms: np.ndarray | None,
    window_ms: tuple[float, float],
) -> np.ndarray:
    """n × (channels · samples-in-window) matrix."""
    if isinstance(epochs, np.ndarray):
        data = np.asarray(epochs, dtype=float)
        if data.ndim != 3:
            raise DimensionMismatchError(f"epoch array must be n x channels x time, got {data.shape}")
        if times_ms is None:
            raise ValueError("times_ms is required for raw epoch arrays")
        times = np.asarray(times_ms, dtype=float)
    else:
        if not epochs:
            return np.empty((0, 0))
        data = np.stack([e.samples for e in epochs])
        times = epochs[0].times_ms
    if times.shape[0] != data.shape[2]:
        raise DimensionMismatchError(f"{times.shape[0]} time stamps for {data.shape[2]} samples")
    mask = interval_mask(times, window_ms)
    if not mask.any():
        raise ValueError(f"window {window_ms} ms contains no samples")
    return data[:, :, mask].reshape(data.shape[0], -1)


def _matched_subsets(
    a: np.ndarray, b: np.ndarray, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    k = min(a.shape[0], b.shape[0])

    def draw(x: np.ndarray) -> np.ndarray:
        if x.shape[0] == k:
            return x
        return x[np.sort(rng.choice(x.shape[0], size=k, replace=False))]

    return draw(a), draw(b)


def _distance_pairs(own: np.ndarray, other: np.ndarray) -> np.ndarray:
    """
    (leave-one-out own distance, other-group distance) for every row of ``own``.

    Each distance is divided by its expectation factor under homogeneity:
    ``x - mean`` over ``m`` independent epochs has ``(1 + 1/m)`` times the
    epoch variance, so the own distance uses ``n1 / (n1 - 1)`` and the
    other-group distance ``(n2 + 1) / n2``, which centres the paired
    differences on zero.
    """
    n, m = own.shape[0], other.shape[0]
    total = own.sum(axis=0)
    loo = (total[None, :] - own) / (n - 1)
    other_avg = other.mean(axis=0)
    d_own = np.sum((own - loo) ** 2, axis=1) * (n - 1) / n
    d_other = np.sum((own - other_avg[None, :]) ** 2, axis=1) * m / (m + 1)
    return np.column_stack([d_own, d_other])


@dataclass(frozen=True)
class HomogeneityEntry:
    label: int
    dataset: str
    t_statistic: float
    p_value: float
    distances: np.ndarray
    n_group1: int
    n_group2: int
    symmetric: bool = False

    @property
    def n_pairs(self) -> int:
        return int(self.distances.shape[0])

    def to_dict(self) -> dict[str, object]:
        return {
            "label": self.label,
            "dataset": self.dataset,
            "t_statistic": self.t_statistic,
            "p_value": self.p_value,
            "n_group1": self.n_group1,
            "n_group2": self.n_group2,
            "n_pairs": self.n_pairs,
            "symmetric": self.symmetric,
        }


def bootstrap_homogeneity(
    epochs_g1: Sequence[Epoch] | np.ndarray,
    epochs_g2: Sequence[Epoch] | np.ndarray,
    label: int,
    window_ms: tuple[float, float] = DEFAULT_TEST_WINDOW_MS,
    *,
    times_ms: np.ndarray | None = None,
    dataset: str = "",
    symmetric: bool = False,
    seed: int | None = 0,
) -> HomogeneityEntry:
    """
    Paired two-sided t-test of leave-one-out own-group distance against
    other-group distance. ``symmetric=True`` also iterates over group-2 epochs.

    The larger group is first subsampled (without replacement, drawn with
    ``seed``) to the size of the smaller one. The other-group average is
    shared by every pair, so the t-test is only calibrated when both
    averages rest on the same number of epochs.
    """
    a = _stack(epochs_g1, times_ms, window_ms)
    b = _stack(epochs_g2, times_ms, window_ms)
    if a.shape[0] < 2 or b.shape[0] < 2:
        raise InsufficientDataError(
            f"each group needs >= 2 epochs of class {label}, got {a.shape[0]} and {b.shape[0]}"
        )
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatchError(f"group epochs differ in size: {a.shape[1]} vs {b.shape[1]}")
    sa, sb = _matched_subsets(a, b, np.random.default_rng(seed))
    pairs = _distance_pairs(sa, sb)
    if symmetric:
        pairs = np.vstack([pairs, _distance_pairs(sb, sa)])
    result = stats.ttest_rel(pairs[:, 0], pairs[:, 1])
    t, p = float(result.statistic), float(result.pvalue)
    if not np.isfinite(p):
        t, p = 0.0, 1.0
    logger.debug("homogeneity %s class %+d: t=%.3f p=%.4g (%d pairs)", dataset, label, t, p, pairs.shape[0])
    return HomogeneityEntry(
        label=int(label),
        dataset=dataset,
        t_statistic=t,
        p_value=float(np.clip(p, 0.0, 1.0)),
        distances=pairs,
        n_group1=int(a.shape[0]),
        n_group2=int(b.shape[0]),
        symmetric=symmetric,
    )


@dataclass
class HomogeneityReport:
    """Entries per (class, dataset) with a Bonferroni-corrected threshold."""
    entries: list[HomogeneityEntry] = field(default_factory=list)
    alpha: float = 0.05
    n_tests: int = 13

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.n_tests < 1:
            raise ValueError(f"n_tests must be >= 1, got {self.n_tests}")

    @property
    def threshold(self) -> float:
        return self.alpha / self.n_tests

    def add(self, entry: HomogeneityEntry) -> None:
        self.entries.append(entry)

    def significant(self, entry: HomogeneityEntry) -> bool:
        return entry.p_value < self.threshold

    @property
    def rejections(self) -> list[HomogeneityEntry]:
        return [e for e in self.entries if self.significant(e)]

    def to_dict(self) -> dict[str, object]:
        return {
            "alpha": self.alpha,
            "n_tests": self.n_tests,
            "threshold": self.threshold,
            "entries": [dict(e.to_dict(), significant=self.significant(e)) for e in self.entries],
        }
