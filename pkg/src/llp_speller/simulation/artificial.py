"""
Artificial Datasets
===================
Re-group labelled epochs into sequence groups with prescribed class
proportions, so the LLP decoder can be studied under any mixing matrix.

Epochs are taken chronologically from the start of the pool, then dealt
to the groups at random within the per-group target counts.

Example::

    pool = LabeledPool.from_model(model, n_targets=300, n_non_targets=900, rng=rng)
    data = assemble_artificial(pool, MixingMatrix.speller(), n=680, rng=rng)
    data.realized_ratios()       # ~[0.375, 0.111]
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import DimensionMismatchError, InsufficientDataError
from ..models.mixing import MixingMatrix
from ..models.signal import FeatureVector
from .model import SyntheticModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LabeledPool:
    """Chronologically ordered epochs (n × d) with ±1 labels."""
    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        X = np.atleast_2d(np.array(self.features, dtype=float))
        y = np.where(np.asarray(self.labels).reshape(-1) > 0, 1, -1)
        if X.shape[0] != y.shape[0]:
            raise DimensionMismatchError(f"{X.shape[0]} epochs for {y.shape[0]} labels")
        if not (np.any(y > 0) and np.any(y < 0)):
            raise InsufficientDataError("a labelled pool needs both targets and non-targets")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[FeatureVector | np.ndarray, int]]) -> "LabeledPool":
        return cls(
            np.vstack([np.asarray(x, dtype=float) for x, _ in pairs]),
            np.array([label for _, label in pairs]),
        )

    @classmethod
    def from_model(
        cls, m: SyntheticModel, n_targets: int, n_non_targets: int, rng: np.random.Generator
    ) -> "LabeledPool":
        """Fresh draws in random chronological order."""
        labels = np.concatenate([np.ones(n_targets, dtype=int), -np.ones(n_non_targets, dtype=int)])
        labels = rng.permutation(labels)
        return cls(m.sample_epochs(labels, rng), labels)

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    @property
    def n_targets(self) -> int:
        return int(np.sum(self.labels > 0))

    @property
    def n_non_targets(self) -> int:
        return int(np.sum(self.labels < 0))


@dataclass(frozen=True)
class ArtificialDataset:
    """Epochs with group tags (1-based); labels are kept for evaluation only."""
    features: np.ndarray
    groups: np.ndarray
    labels: np.ndarray
    mixing: MixingMatrix

    def group_counts(self) -> np.ndarray:
        return np.bincount(self.groups, minlength=self.mixing.n_groups + 1)[1:]

    def realized_ratios(self) -> np.ndarray:
        """Target share per group."""
        out = np.zeros(self.mixing.n_groups)
        for k in range(self.mixing.n_groups):
            in_group = self.groups == k + 1
            if in_group.any():
                out[k] = float(np.mean(self.labels[in_group] > 0))
        return out


def group_sizes(n: int, n_groups: int) -> np.ndarray:
    """Equal split of ``n`` epochs; the first ``n % G`` groups get one more."""
    sizes = np.full(n_groups, n // n_groups, dtype=int)
    sizes[: n % n_groups] += 1
    return sizes


def target_counts(m: MixingMatrix, sizes: np.ndarray) -> np.ndarray:
    """Per-group target counts, rounded half up from ``pi_plus * size``."""
    pi_plus = m.as_array()[:, 0]
    return np.floor(pi_plus * sizes + 0.5).astype(int)


def assemble_artificial(
    pool: LabeledPool,
    m: MixingMatrix,
    n: int,
    rng: np.random.Generator,
    sizes: Sequence[int] | None = None,
) -> ArtificialDataset:
    """
    Build ``n`` epochs split over the groups of ``m`` with target shares as
    close to the rows of ``m`` as integer counts allow.
    """
    size_arr = group_sizes(n, m.n_groups) if sizes is None else np.asarray(sizes, dtype=int)
    if size_arr.shape[0] != m.n_groups or int(size_arr.sum()) != n:
        raise DimensionMismatchError(f"group sizes {size_arr.tolist()} do not split {n} epochs")
    n_tgt = target_counts(m, size_arr)
    n_non = size_arr - n_tgt
    need_t, need_n = int(n_tgt.sum()), int(n_non.sum())
    if need_t > pool.n_targets or need_n > pool.n_non_targets:
        raise InsufficientDataError(
            f"need {need_t} targets / {need_n} non-targets, pool has "
            f"{pool.n_targets} / {pool.n_non_targets}"
        )
    tgt_idx = rng.permutation(np.flatnonzero(pool.labels > 0)[:need_t])
    non_idx = rng.permutation(np.flatnonzero(pool.labels < 0)[:need_n])

    index_parts, group_parts = [], []
    t_off = n_off = 0
    for k in range(m.n_groups):
        idx = np.concatenate([tgt_idx[t_off : t_off + n_tgt[k]], non_idx[n_off : n_off + n_non[k]]])
        t_off += n_tgt[k]
        n_off += n_non[k]
        index_parts.append(idx)
        group_parts.append(np.full(idx.shape[0], k + 1, dtype=int))
    order = rng.permutation(n)
    index = np.concatenate(index_parts)[order]
    groups = np.concatenate(group_parts)[order]
    logger.debug("assembled %d epochs into groups %s with targets %s", n, size_arr.tolist(), n_tgt.tolist())
    return ArtificialDataset(
        features=pool.features[index],
        groups=groups,
        labels=pool.labels[index],
        mixing=m,
    )
