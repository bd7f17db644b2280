"""
Raw Recording Synthesis
=======================
Render trials into a continuous multichannel recording with stimulus
markers, for exercising the preprocessing chain end to end.

Each stimulus onset adds an evoked waveform: an occipital negativity around
150 ms for every stimulus, plus a centro-parietal positivity around 350 ms
scaled by ``snr_scale`` for targets. Background activity is white noise.
"""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from ..builder.trial_builder import label_stimuli
from ..models.sequence import SymbolGrid, Trial
from ..models.signal import DEFAULT_MONTAGE, ContinuousRecording, Marker
from .model import _CENTRO_PARIETAL, _OCCIPITAL

logger = logging.getLogger(__name__)


def _bump(t_ms: np.ndarray, centre_ms: float, width_ms: float) -> np.ndarray:
    return np.exp(-0.5 * ((t_ms - centre_ms) / width_ms) ** 2)


def evoked_waveforms(
    channel_names: Sequence[str], rate: float, snr_scale: float, length_ms: float = 800.0
) -> tuple[np.ndarray, np.ndarray]:
    """(target, non-target) waveforms, channels × samples, starting at onset."""
    t = np.arange(int(round(length_ms * rate / 1000.0))) * 1000.0 / rate
    visual = -4.0 * _bump(t, 150.0, 25.0)
    p300 = 6.0 * _bump(t, 350.0, 80.0)
    non_target = np.zeros((len(channel_names), t.shape[0]))
    target = np.zeros_like(non_target)
    for c, name in enumerate(channel_names):
        if name in _OCCIPITAL:
            non_target[c] += visual
            target[c] += visual * (1.0 + 0.5 * snr_scale)
        if name in _CENTRO_PARIETAL:
            target[c] += snr_scale * p300
    return target, non_target


def synthesize_recording(
    trials: Sequence[Trial],
    attended: Sequence[int],
    *,
    grid: SymbolGrid | None = None,
    rate: float = 1000.0,
    snr_scale: float = 1.0,
    noise_uv: float = 5.0,
    channel_names: Sequence[str] = DEFAULT_MONTAGE,
    lead_in_ms: float = 1000.0,
    tail_ms: float = 1500.0,
    seed: int | None = None,
) -> ContinuousRecording:
    """One recording holding all trials back to back at each trial's SOA."""
    if len(trials) != len(attended):
        raise ValueError(f"{len(trials)} trials but {len(attended)} attended symbols")
    grid = grid or SymbolGrid.speller()
    rng = np.random.default_rng(seed)
    target_wave, non_target_wave = evoked_waveforms(channel_names, rate, snr_scale)
    wave_len = target_wave.shape[1]

    onsets: list[tuple[int, Marker]] = []
    cursor = lead_in_ms
    for trial, symbol in zip(trials, attended):
        labels = label_stimuli(trial, symbol, grid)
        for stim, label in zip(trial.stimuli, labels):
            idx = int(round(cursor * rate / 1000.0))
            onsets.append((idx, Marker(idx, symbol, stim.group, int(label))))
            cursor += trial.soa_ms
    n_samples = int(round((cursor + tail_ms) * rate / 1000.0))

    samples = rng.normal(scale=noise_uv, size=(len(channel_names), n_samples))
    for idx, marker in onsets:
        wave = target_wave if marker.label == 1 else non_target_wave
        end = min(idx + wave_len, n_samples)
        samples[:, idx:end] += wave[:, : end - idx]
    logger.debug("synthesized %d samples with %d markers at %.0f Hz", n_samples, len(onsets), rate)
    return ContinuousRecording(samples, rate, tuple(channel_names), tuple(m for _, m in onsets))
