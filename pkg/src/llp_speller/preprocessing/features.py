"""
Interval Features
=================
Mean amplitudes over fixed post-stimulus intervals, per channel, and the
end-to-end chain from a raw recording to feature vectors.

Example::

    from llp_speller.preprocessing import preprocess_recording

    result = preprocess_recording(recording)     # default settings
    X = result.matrix()                          # n_epochs x 174
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..models.signal import (
    DEFAULT_EXCLUDED_CHANNELS,
    DEFAULT_INTERVALS,
    ContinuousRecording,
    Epoch,
    FeatureVector,
    Marker,
    PreprocessingSettings,
)
from .epochs import baseline_correct, downsample, extract_epochs, interval_mask
from .filters import apply_filter, design_bandpass

logger = logging.getLogger(__name__)


def select_channels(
    channel_names: Sequence[str], excluded: Sequence[str] = DEFAULT_EXCLUDED_CHANNELS
) -> tuple[str, ...]:
    """Channel names in recording order, minus the excluded ones."""
    drop = set(excluded)
    return tuple(ch for ch in channel_names if ch not in drop)


def interval_features(
    e: Epoch,
    intervals: Sequence[tuple[float, float]] = DEFAULT_INTERVALS,
    channels: Sequence[str] | None = None,
) -> FeatureVector:
    """
    Mean of the samples with ``lo <= t <= hi`` for every (interval, channel).

    ``channels`` defaults to all epoch channels except Fp1 and Fp2.
    """
    keep = tuple(channels) if channels is not None else select_channels(e.channel_names)
    rows = [e.channel_index(ch) for ch in keep]
    times = e.times_ms
    values = np.empty((len(intervals), len(rows)))
    for i, iv in enumerate(intervals):
        mask = interval_mask(times, iv)
        if not mask.any():
            raise ValueError(f"interval {iv} ms contains no samples at {e.rate} Hz")
        values[i] = e.samples[np.ix_(rows, np.flatnonzero(mask))].mean(axis=1)
    return FeatureVector(
        values=values.reshape(-1),
        intervals=tuple(tuple(iv) for iv in intervals),
        channel_names=keep,
        marker=e.marker,
    )


@dataclass
class PreprocessedData:
    features: list[FeatureVector] = field(default_factory=list)
    epochs: list[Epoch] = field(default_factory=list)
    skipped: list[Marker] = field(default_factory=list)

    def matrix(self) -> np.ndarray:
        if not self.features:
            return np.empty((0, 0))
        return np.vstack([np.asarray(f) for f in self.features])

    def markers(self) -> list[Marker]:
        return [f.marker for f in self.features if f.marker is not None]


def preprocess_recording(
    rec: ContinuousRecording,
    settings: PreprocessingSettings | None = None,
) -> PreprocessedData:
    """Filter, decimate, epoch, baseline-correct and average into interval features."""
    settings = settings or PreprocessingSettings()
    sos = design_bandpass(settings.filter, rec.rate)
    filtered = apply_filter(sos, rec)

    factor = max(1, int(round(rec.rate / settings.target_rate_hz)))
    if abs(rec.rate / factor - settings.target_rate_hz) > 1e-9:
        logger.warning(
            "rate %.3f Hz is not an integer multiple of %.3f Hz; decimating by %d",
            rec.rate, settings.target_rate_hz, factor,
        )
    decimated = downsample(filtered, factor)

    extraction = extract_epochs(decimated, settings.effective_window)
    channels = select_channels(rec.channel_names, settings.excluded_channels)
    out = PreprocessedData(skipped=list(extraction.skipped))
    for epoch in extraction.epochs:
        corrected = baseline_correct(epoch, settings.baseline_ms)
        out.epochs.append(corrected)
        out.features.append(interval_features(corrected, settings.effective_intervals, channels))
    logger.info(
        "preprocessed %d epochs into %d features each",
        len(out.features), len(channels) * len(settings.effective_intervals),
    )
    return out
