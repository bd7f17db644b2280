"""
Synthetic ERP Model
===================
Gaussian class-conditional feature model with a shared covariance, used to
simulate spelling sessions directly in feature space.

Targets are drawn around ``centre + snr_scale * half``, non-targets around
``centre - snr_scale * half``, where ``centre`` and ``half`` are the midpoint
and half-difference of the two templates. ``snr_scale = 0`` makes both
classes identical; ``snr_scale = 1`` reproduces the templates.

Example::

    from llp_speller.simulation import SyntheticModel, calibrate_snr

    model = SyntheticModel.default(seed=0)
    snr = calibrate_snr(model, target_auc=0.97, seed=1)
    X = model.with_snr(snr).sample_epochs(labels, rng)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Any, Sequence

import numpy as np
from scipy import linalg

from ..errors import ConvergenceError, DimensionMismatchError
from ..evaluation.crossval import chronological_cv
from ..models.signal import (
    DEFAULT_EXCLUDED_CHANNELS,
    DEFAULT_INTERVALS,
    DEFAULT_MONTAGE,
    FeatureVector,
)

logger = logging.getLogger(__name__)

# Electrode groups carrying the simulated components.
_OCCIPITAL = ("O1", "Oz", "O2", "PO9", "PO10", "POz", "P7", "P8")
_CENTRO_PARIETAL = ("Fz", "FC1", "FC2", "C3", "Cz", "C4", "CP1", "CP2", "P3", "Pz", "P4")

# Epochs used by calibrate_snr: one 63-character sentence of 68 stimuli each.
CALIBRATION_EPOCHS = 63 * 68
TARGETS_PER_TRIAL = 16
STIMULI_PER_TRIAL = 68


def erp_templates(
    channel_names: Sequence[str],
    n_intervals: int = len(DEFAULT_INTERVALS),
) -> tuple[np.ndarray, np.ndarray]:
    """
    Target and non-target feature templates (interval-major).

    Both classes share an occipital visual response in the second interval;
    targets add a stronger occipital negativity and a centro-parietal
    positivity peaking in the fifth interval.
    """
    n_ch = len(channel_names)
    plus = np.zeros((n_intervals, n_ch))
    minus = np.zeros((n_intervals, n_ch))
    for c, name in enumerate(channel_names):
        if name in _OCCIPITAL and n_intervals > 1:
            minus[1, c] = -0.3
            plus[1, c] = -1.0
        if name in _CENTRO_PARIETAL:
            for i, amp in ((3, 0.8), (4, 1.0), (5, 0.3)):
                if i < n_intervals:
                    plus[i, c] = amp
    return plus.reshape(-1), minus.reshape(-1)


@dataclass(frozen=True)
class SyntheticModel:
    mu_plus: np.ndarray
    mu_minus: np.ndarray
    covariance: np.ndarray
    snr_scale: float = 1.0
    channel_names: tuple[str, ...] = ()
    intervals: tuple[tuple[float, float], ...] = ()
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        plus = np.array(self.mu_plus, dtype=float).reshape(-1)
        minus = np.array(self.mu_minus, dtype=float).reshape(-1)
        cov = np.array(self.covariance, dtype=float)
        d = plus.shape[0]
        if minus.shape[0] != d or cov.shape != (d, d):
            raise DimensionMismatchError(
                f"templates of size {plus.shape[0]}/{minus.shape[0]} with covariance {cov.shape}"
            )
        if not np.allclose(cov, cov.T, atol=1e-10):
            raise ValueError("covariance must be symmetric")
        if self.snr_scale < 0:
            raise ValueError(f"snr_scale must be >= 0, got {self.snr_scale}")
        for arr in (plus, minus, cov):
            arr.setflags(write=False)
        object.__setattr__(self, "mu_plus", plus)
        object.__setattr__(self, "mu_minus", minus)
        object.__setattr__(self, "covariance", cov)
        object.__setattr__(self, "channel_names", tuple(self.channel_names))
        object.__setattr__(self, "intervals", tuple(tuple(iv) for iv in self.intervals))
        if self.channel_names and len(self.channel_names) * len(self.intervals) != d:
            raise DimensionMismatchError(
                f"{len(self.intervals)} intervals x {len(self.channel_names)} channels != d={d}"
            )
        # Fails early with LinAlgError if the covariance is not positive definite.
        _ = self.cholesky

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def default(
        cls,
        seed: int = 0,
        snr_scale: float = 1.0,
        rank: int = 5,
        loading: float = 0.5,
        channel_names: Sequence[str] | None = None,
        intervals: Sequence[tuple[float, float]] = DEFAULT_INTERVALS,
    ) -> "SyntheticModel":
        """
        ERP-like templates over the 29 scalp channels and six intervals with
        covariance ``I + U Uᵀ`` (``U``: d × rank, entries N(0, loading²)).
        """
        if channel_names is None:
            channel_names = [c for c in DEFAULT_MONTAGE if c not in DEFAULT_EXCLUDED_CHANNELS]
        plus, minus = erp_templates(channel_names, len(intervals))
        d = plus.shape[0]
        rng = np.random.default_rng(seed)
        u = rng.normal(scale=loading, size=(d, rank))
        cov = np.eye(d) + u @ u.T
        return cls(
            plus, minus, cov, snr_scale,
            channel_names=tuple(channel_names),
            intervals=tuple(intervals),
            metadata={"seed": seed, "rank": rank, "loading": loading},
        )

    def with_snr(self, snr_scale: float) -> "SyntheticModel":
        return replace(self, snr_scale=float(snr_scale))

    # ------------------------------------------------------------------
    # Derived quantities
    # ------------------------------------------------------------------

    @property
    def d(self) -> int:
        return int(self.mu_plus.shape[0])

    @property
    def centre(self) -> np.ndarray:
        return (self.mu_plus + self.mu_minus) / 2.0

    @property
    def half_difference(self) -> np.ndarray:
        return (self.mu_plus - self.mu_minus) / 2.0

    def class_mean(self, label: int) -> np.ndarray:
        sign = 1.0 if label > 0 else -1.0
        return self.centre + sign * self.snr_scale * self.half_difference

    @property
    def effective_difference(self) -> np.ndarray:
        """Mean difference at the current ``snr_scale``."""
        return 2.0 * self.snr_scale * self.half_difference

    @cached_property
    def cholesky(self) -> np.ndarray:
        return np.asarray(linalg.cholesky(self.covariance, lower=True))

    # ------------------------------------------------------------------
    # Sampling
    # ------------------------------------------------------------------

    def features_from_noise(self, labels: np.ndarray, z: np.ndarray) -> np.ndarray:
        """Epochs for given labels from standard-normal draws ``z`` (n × d)."""
        y = np.where(np.asarray(labels).reshape(-1) > 0, 1.0, -1.0)
        return self.centre + np.outer(y, self.snr_scale * self.half_difference) + z @ self.cholesky.T

    def sample_epochs(self, labels: Sequence[int] | np.ndarray, rng: np.random.Generator) -> np.ndarray:
        y = np.asarray(labels).reshape(-1)
        z = rng.standard_normal((y.shape[0], self.d))
        return self.features_from_noise(y, z)

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "mu_plus": self.mu_plus.tolist(),
            "mu_minus": self.mu_minus.tolist(),
            "covariance": self.covariance.tolist(),
            "snr_scale": self.snr_scale,
            "channel_names": list(self.channel_names),
            "intervals": [list(iv) for iv in self.intervals],
            "metadata": dict(self.metadata),
        }

    @classmethod
    def from_json_dict(cls, data: dict[str, Any]) -> "SyntheticModel":
        return cls(
            np.asarray(data["mu_plus"]),
            np.asarray(data["mu_minus"]),
            np.asarray(data["covariance"]),
            float(data.get("snr_scale", 1.0)),
            channel_names=tuple(data.get("channel_names", ())),
            intervals=tuple(tuple(iv) for iv in data.get("intervals", ())),
            metadata=dict(data.get("metadata", {})),
        )


def sample_epoch(m: SyntheticModel, label: int, rng: np.random.Generator) -> FeatureVector:
    """One epoch as a :class:`FeatureVector` (requires a model with layout metadata)."""
    values = m.sample_epochs([label], rng)[0]
    if not m.channel_names:
        raise ValueError("model has no channel layout; use SyntheticModel.sample_epochs")
    return FeatureVector(values, m.intervals, m.channel_names)


# ---------------------------------------------------------------------------
# SNR calibration
# ---------------------------------------------------------------------------


def calibration_labels(n_epochs: int, rng: np.random.Generator) -> np.ndarray:
    """Chronological labels with 16 targets placed at random in every block of 68."""
    labels = np.full(n_epochs, -1, dtype=int)
    for start in range(0, n_epochs, STIMULI_PER_TRIAL):
        size = min(STIMULI_PER_TRIAL, n_epochs - start)
        k = max(1, round(size * TARGETS_PER_TRIAL / STIMULI_PER_TRIAL))
        labels[start + rng.choice(size, size=k, replace=False)] = 1
    return labels


def calibrate_snr(
    m: SyntheticModel,
    target_auc: float,
    seed: int | None = None,
    *,
    n_epochs: int = CALIBRATION_EPOCHS,
    folds: int = 5,
    tolerance: float = 0.005,
    accept: float = 0.01,
    max_iter: int = 40,
) -> float:
    """
    ``snr_scale`` at which the supervised chronological-CV AUC hits ``target_auc``.

    The same noise draws are reused at every candidate scale, so the AUC is
    a smooth increasing function of the scale and bisection applies.
    """

    if not 0.5 <= target_auc < 1.0:
        raise ValueError(f"target AUC must lie in [0.5, 1), got {target_auc}")
    rng = np.random.default_rng(seed)
    labels = calibration_labels(n_epochs, rng)
    z = rng.standard_normal((n_epochs, m.d))

    def cv_auc(scale: float) -> float:
        X = m.with_snr(scale).features_from_noise(labels, z)
        return chronological_cv(X, labels, k=folds)

    floor = cv_auc(0.0)
    if target_auc <= floor:
        logger.info("target AUC %.3f at or below chance-level AUC %.3f; snr_scale = 0", target_auc, floor)
        return 0.0

    lo, hi = 0.0, 1.0
    auc_hi = cv_auc(hi)
    doublings = 0
    while auc_hi < target_auc:
        lo, hi = hi, hi * 2.0
        auc_hi = cv_auc(hi)
        doublings += 1
        if doublings > 20:
            raise ConvergenceError(f"AUC {target_auc} unreachable (reached {auc_hi:.4f} at scale {hi:g})")

    best_scale, best_auc = hi, auc_hi
    for _ in range(max_iter):
        mid = (lo + hi) / 2.0
        auc_mid = cv_auc(mid)
        if abs(auc_mid - target_auc) < abs(best_auc - target_auc):
            best_scale, best_auc = mid, auc_mid
        if abs(auc_mid - target_auc) <= tolerance:
            break
        if auc_mid < target_auc:
            lo = mid
        else:
            hi = mid
    if abs(best_auc - target_auc) > accept:
        raise ConvergenceError(
            f"calibration stalled at AUC {best_auc:.4f} for target {target_auc:.4f}"
        )
    logger.info("calibrated snr_scale=%.4f (cv AUC %.4f, target %.4f)", best_scale, best_auc, target_auc)
    return float(best_scale)
