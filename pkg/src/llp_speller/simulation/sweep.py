"""
Mixing-Matrix Sweep
===================
How well the class means are recovered under different mixing matrices.

``reconstruction_rmse`` measures the error of the reconstructed class means
for one mixing matrix and one seed; ``naf_sweep`` averages it over seeds
for a set of candidate matrices, optionally with the held-out AUC of the
unsupervised classifier.

Example::

    rows = naf_sweep(candidate_mixings(), SyntheticModel.default(), n=2160, seeds=range(50))
    [(r.label, round(r.naf, 2), r.mean_rmse) for r in rows]
"""

from __future__ import annotations

import logging
from typing import Iterable, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..decoder.classifier import LinearClassifier, train_llp
from ..decoder.state import OnlineLLPState
from ..evaluation.crossval import Trainer, chronological_cv
from ..mixing.mean_map import noise_amplification, pseudoinverse, reconstruct_means
from ..models.mixing import GroupMeans, MixingMatrix
from .artificial import ArtificialDataset, LabeledPool, assemble_artificial, group_sizes, target_counts
from .model import SyntheticModel

logger = logging.getLogger(__name__)


def candidate_mixings() -> list[MixingMatrix]:
    """Mixing matrices with well-separated noise amplification (ascending)."""
    return [
        MixingMatrix(rows=((0.8, 0.2), (0.1, 0.9)), label="well-separated"),
        MixingMatrix(rows=((0.5, 0.5), (0.1, 0.9)), label="reduced"),
        MixingMatrix(rows=((0.5, 0.5), (0.2, 0.8), (0.1, 0.9)), label="three-group"),
        MixingMatrix.speller(),
        MixingMatrix(rows=((0.3, 0.7), (0.2, 0.8)), label="similar"),
    ]


def _dataset(m: SyntheticModel, mixing: MixingMatrix, n: int, rng: np.random.Generator) -> ArtificialDataset:
    sizes = group_sizes(n, mixing.n_groups)
    n_tgt = int(target_counts(mixing, sizes).sum())
    pool = LabeledPool.from_model(m, n_tgt, n - n_tgt, rng)
    return assemble_artificial(pool, mixing, n, rng, sizes=sizes)


def _group_means(data: ArtificialDataset) -> GroupMeans:
    G = data.mixing.n_groups
    means = np.vstack([data.features[data.groups == k + 1].mean(axis=0) for k in range(G)])
    return GroupMeans(means, data.group_counts().astype(float))


def reconstruction_rmse(m: SyntheticModel, mixing: MixingMatrix, n: int, seed: int | None = None) -> float:
    """RMSE over both reconstructed class means against the generative ones."""
    rng = np.random.default_rng(seed)
    data = _dataset(m, mixing, n, rng)
    rec = reconstruct_means(pseudoinverse(mixing), _group_means(data))
    err = np.concatenate([rec.mu_plus - m.class_mean(1), rec.mu_minus - m.class_mean(-1)])
    return float(np.sqrt(np.mean(err ** 2)))


def llp_trainer(mixing: MixingMatrix) -> Trainer:
    """Trainer for chronological_cv that sees group tags but never labels."""
    def train(X: np.ndarray, y: np.ndarray, groups: np.ndarray | None) -> LinearClassifier:
        if groups is None:
            raise ValueError("the LLP trainer needs group tags")
        state = OnlineLLPState(d=X.shape[1], n_groups=mixing.n_groups)
        state.update_batch(X, groups)
        return train_llp(state, mixing)

    return train


class SweepRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: str
    rows: tuple[tuple[float, float], ...]
    naf: float
    n_epochs: int = Field(..., ge=1)
    n_seeds: int = Field(..., ge=1)
    mean_rmse: float
    std_rmse: float
    llp_auc: float | None = None
    supervised_auc: float | None = None


def naf_sweep(
    candidates: Sequence[MixingMatrix],
    m: SyntheticModel,
    n: int,
    seeds: Iterable[int],
    evaluate_auc: bool = False,
    folds: int = 5,
) -> list[SweepRow]:
    seed_list = list(seeds)
    if not seed_list:
        raise ValueError("naf_sweep needs at least one seed")
    rows: list[SweepRow] = []
    for mixing in candidates:
        naf = noise_amplification(mixing)
        errors = [reconstruction_rmse(m, mixing, n, seed) for seed in seed_list]
        llp_auc = sup_auc = None
        if evaluate_auc:
            llp, sup = [], []
            for seed in seed_list:
                data = _dataset(m, mixing, n, np.random.default_rng(seed))
                llp.append(
                    chronological_cv(data.features, data.labels, k=folds,
                                     trainer=llp_trainer(mixing), groups=data.groups)
                )
                sup.append(chronological_cv(data.features, data.labels, k=folds))
            llp_auc, sup_auc = float(np.mean(llp)), float(np.mean(sup))
        row = SweepRow(
            label=mixing.label or repr(mixing),
            rows=mixing.rows,
            naf=naf,
            n_epochs=n,
            n_seeds=len(seed_list),
            mean_rmse=float(np.mean(errors)),
            std_rmse=float(np.std(errors)),
            llp_auc=llp_auc,
            supervised_auc=sup_auc,
        )
        logger.info("%s: NAF %.2f, RMSE %.4f", row.label, naf, row.mean_rmse)
        rows.append(row)
    return rows
