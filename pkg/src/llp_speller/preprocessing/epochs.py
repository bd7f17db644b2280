"""
Epoching
========
Decimation of filtered recordings, epoch extraction around stimulus
markers, and baseline correction.
"""

from __future__ import annotations

import logging
from collections.abc import Iterator
from dataclasses import dataclass, field

import numpy as np

from ..models.signal import (
    DEFAULT_BASELINE_MS,
    DEFAULT_WINDOW_MS,
    ContinuousRecording,
    Epoch,
    Marker,
)

logger = logging.getLogger(__name__)

# Tolerance when comparing sample times (ms) against interval endpoints.
_TIME_TOL = 1e-6


def downsample(rec: ContinuousRecording, factor: int) -> ContinuousRecording:
    """
    Keep every ``factor``-th sample starting at 0.

    Markers move to the retained sample at or before the onset
    (``index // factor``). The input must already be low-pass filtered.
    """
    if factor < 1:
        raise ValueError(f"decimation factor must be >= 1, got {factor}")
    if factor == 1:
        return rec
    markers = tuple(
        Marker(m.sample_index // factor, m.symbol, m.group, m.label) for m in rec.markers
    )
    indices = [m.sample_index for m in markers]
    if len(set(indices)) != len(indices):
        raise ValueError(f"markers collide after decimation by {factor}")
    return ContinuousRecording(
        samples=rec.samples[:, ::factor],
        rate=rec.rate / factor,
        channel_names=rec.channel_names,
        markers=markers,
    )


def window_offsets(window_ms: tuple[float, float], rate: float) -> tuple[int, int]:
    """First and last sample offset (inclusive) of a window."""
    start, end = window_ms
    if not start < end:
        raise ValueError(f"window start must precede end, got {window_ms}")
    return int(round(start * rate / 1000.0)), int(round(end * rate / 1000.0))


@dataclass
class EpochExtraction:
    """Epochs that fit in the recording plus markers skipped at its edges."""
    epochs: list[Epoch] = field(default_factory=list)
    skipped: list[Marker] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.epochs)

    def __iter__(self) -> Iterator[Epoch]:
        return iter(self.epochs)


def extract_epochs(
    rec: ContinuousRecording,
    window_ms: tuple[float, float] = DEFAULT_WINDOW_MS,
) -> EpochExtraction:
    first, last = window_offsets(window_ms, rec.rate)
    result = EpochExtraction()
    for m in rec.markers:
        lo, hi = m.sample_index + first, m.sample_index + last
        if lo < 0 or hi >= rec.n_samples:
            result.skipped.append(m)
            continue
        result.epochs.append(
            Epoch(
                samples=rec.samples[:, lo : hi + 1],
                start_ms=first * 1000.0 / rec.rate,
                rate=rec.rate,
                channel_names=rec.channel_names,
                marker=m,
            )
        )
    if result.skipped:
        logger.warning(
            "skipped %d marker(s) too close to the recording edge for window %s ms",
            len(result.skipped),
            window_ms,
        )
    return result


def interval_mask(times_ms: np.ndarray, interval_ms: tuple[float, float]) -> np.ndarray:
    lo, hi = interval_ms
    return (times_ms >= lo - _TIME_TOL) & (times_ms <= hi + _TIME_TOL)


def baseline_correct(e: Epoch, interval_ms: tuple[float, float] = DEFAULT_BASELINE_MS) -> Epoch:
    """Subtract, per channel, the mean over samples inside ``interval_ms`` (inclusive)."""
    mask = interval_mask(e.times_ms, interval_ms)
    if not mask.any():
        raise ValueError(f"baseline interval {interval_ms} ms contains no samples of the epoch")
    baseline = e.samples[:, mask].mean(axis=1, keepdims=True)
    return e.with_samples(e.samples - baseline)
