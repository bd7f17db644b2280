"""
Band-pass Filtering
===================
Chebyshev Type II band-pass design as cascaded second-order sections and
causal forward filtering of continuous recordings.

Type II filters are specified by where the stop band starts. With
``FilterSpec(edges="passband")`` the band edges are taken as the -3 dB
points instead, and the stop-band edges are derived from order and
attenuation: for a Type II low-pass prototype the -3 dB frequency sits at
``1 / r`` of the stop-band edge with ``r = cosh(arccosh(sqrt(10^(A/10) - 1)) / N)``.
The band-pass transform maps the prototype onto the band with centre
``sqrt(f_lo * f_hi)``, so the stop-band width is ``r * (f_hi - f_lo)`` in
prewarped frequency.

Example::

    from llp_speller.models.signal import FilterSpec
    from llp_speller.preprocessing import design_bandpass, apply_filter

    sos = design_bandpass(FilterSpec(), rate=1000.0)
    filtered = apply_filter(sos, recording)
"""

from __future__ import annotations

import numpy as np
from scipy import signal

from ..models.signal import ContinuousRecording, FilterSpec


def _prewarp(f: float, rate: float) -> float:
    return float(rate / np.pi * np.tan(np.pi * f / rate))


def _unwarp(w: float, rate: float) -> float:
    return float(rate / np.pi * np.arctan(np.pi * w / rate))


def stopband_edges(spec: FilterSpec, rate: float) -> tuple[float, float]:
    """Stop-band edge frequencies (Hz) handed to the Type II design."""
    spec.check_rate(rate)
    if spec.edges == "stopband":
        return spec.low_hz, spec.high_hz
    eps_inv = np.sqrt(10.0 ** (spec.stopband_attenuation_db / 10.0) - 1.0)
    ratio = np.cosh(np.arccosh(eps_inv) / spec.order)
    lo, hi = _prewarp(spec.low_hz, rate), _prewarp(spec.high_hz, rate)
    width = ratio * (hi - lo)
    s_lo = (-width + np.sqrt(width ** 2 + 4.0 * lo * hi)) / 2.0
    s_hi = s_lo + width
    return _unwarp(s_lo, rate), _unwarp(s_hi, rate)


def design_bandpass(spec: FilterSpec, rate: float) -> np.ndarray:
    """Second-order sections (``n_sections x 6``) of the band-pass."""
    edges = stopband_edges(spec, rate)
    sos = signal.cheby2(
        spec.order,
        spec.stopband_attenuation_db,
        edges,
        btype="bandpass",
        fs=rate,
        output="sos",
    )
    return np.asarray(sos)


def frequency_response(sos: np.ndarray, freqs_hz: np.ndarray, rate: float) -> np.ndarray:
    """Complex response H at the given frequencies."""
    _, h = signal.sosfreqz(sos, worN=np.asarray(freqs_hz, dtype=float), fs=rate)
    return np.asarray(h)


def is_stable(sos: np.ndarray) -> bool:
    _, poles, _ = signal.sos2zpk(sos)
    return bool(np.all(np.abs(poles) < 1.0))


def apply_filter(sos: np.ndarray, rec: ContinuousRecording) -> ContinuousRecording:
    """Causal forward filtering along time, per channel; markers are kept."""
    filtered = signal.sosfilt(sos, rec.samples, axis=1)
    return rec.with_samples(filtered)
