"""
ERP Peak Features
=================
Amplitude and latency of the early occipital negativity and the
centro-parietal positivity in a class-average epoch, and the per-dataset
summary row built from them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..errors import InsufficientDataError
from ..models.signal import Epoch
from ..preprocessing.epochs import interval_mask

N150_CHANNEL = "O1"
N150_WINDOW_MS: tuple[float, float] = (100.0, 200.0)
P300_CHANNEL = "Cz"
P300_WINDOW_MS: tuple[float, float] = (250.0, 500.0)


@dataclass(frozen=True)
class PeakFeatures:
    n150_amplitude: float
    n150_latency_ms: float
    p300_amplitude: float
    p300_latency_ms: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.n150_amplitude, self.n150_latency_ms, self.p300_amplitude, self.p300_latency_ms)


def _extremum(e: Epoch, channel: str, window_ms: tuple[float, float], find_max: bool) -> tuple[float, float]:
    row = e.samples[e.channel_index(channel)]
    times = e.times_ms
    idx = np.flatnonzero(interval_mask(times, window_ms))
    if idx.size == 0:
        raise ValueError(f"window {window_ms} ms lies outside the epoch")
    segment = row[idx]
    # argmin/argmax return the first occurrence, so ties resolve to the earliest sample.
    k = int(np.argmax(segment) if find_max else np.argmin(segment))
    return float(segment[k]), float(times[idx[k]])


def peak_features(
    class_avg: Epoch,
    n150_channel: str = N150_CHANNEL,
    p300_channel: str = P300_CHANNEL,
) -> PeakFeatures:
    """Raises ``KeyError`` if either channel is missing."""
    n_amp, n_lat = _extremum(class_avg, n150_channel, N150_WINDOW_MS, find_max=False)
    p_amp, p_lat = _extremum(class_avg, p300_channel, P300_WINDOW_MS, find_max=True)
    return PeakFeatures(n_amp, n_lat, p_amp, p_lat)


def average_epoch(epochs: Sequence[Epoch]) -> Epoch:
    if not epochs:
        raise InsufficientDataError("cannot average an empty set of epochs")
    first = epochs[0]
    mean = np.mean(np.stack([e.samples for e in epochs]), axis=0)
    return Epoch(mean, first.start_ms, first.rate, first.channel_names)


class NeurophysiologyRow(BaseModel):
    """One dataset's row of the ERP summary table."""
    model_config = ConfigDict(frozen=True)

    dataset: str
    n150_amplitude_uv: float
    n150_latency_ms: float
    p300_amplitude_uv: float
    p300_latency_ms: float
    supervised_auc: float | None = Field(None, ge=0.0, le=1.0)
    n_targets: int = Field(..., ge=0)
    n_non_targets: int = Field(..., ge=0)

    @classmethod
    def csv_header(cls) -> list[str]:
        return list(cls.model_fields)

    def csv_row(self) -> list[str]:
        values = self.model_dump()
        return ["" if values[k] is None else str(values[k]) for k in self.csv_header()]


def neurophysiology_row(
    dataset: str,
    targets: Sequence[Epoch],
    non_targets: Sequence[Epoch],
    supervised_auc: float | None = None,
) -> NeurophysiologyRow:
    """Peak features of the target average, with class counts and the supervised AUC."""
    peaks = peak_features(average_epoch(targets))
    return NeurophysiologyRow(
        dataset=dataset,
        n150_amplitude_uv=peaks.n150_amplitude,
        n150_latency_ms=peaks.n150_latency_ms,
        p300_amplitude_uv=peaks.p300_amplitude,
        p300_latency_ms=peaks.p300_latency_ms,
        supervised_auc=supervised_auc,
        n_targets=len(targets),
        n_non_targets=len(non_targets),
    )
