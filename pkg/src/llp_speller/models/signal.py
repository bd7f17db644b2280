"""
Signal Model
============
Containers for the preprocessing chain: continuous recordings with stimulus
markers, epochs cut around the markers, interval-mean feature vectors, and
the band-pass filter specification.

Times are in milliseconds relative to stimulus onset, amplitudes in µV.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..errors import DimensionMismatchError


# ---------------------------------------------------------------------------
# Protocol constants
# ---------------------------------------------------------------------------

DEFAULT_WINDOW_MS: tuple[float, float] = (-200.0, 700.0)
DEFAULT_BASELINE_MS: tuple[float, float] = (-200.0, 0.0)
DEFAULT_EXCLUDED_CHANNELS: tuple[str, ...] = ("Fp1", "Fp2")

# 31-channel cap used by the default synthetic montage and the CSV examples.
DEFAULT_MONTAGE: tuple[str, ...] = (
    "Fp1", "Fp2", "F7", "F3", "Fz", "F4", "F8",
    "FC5", "FC1", "FC2", "FC6", "T7", "C3", "Cz", "C4", "T8",
    "CP5", "CP1", "CP2", "CP6", "P7", "P3", "Pz", "P4", "P8",
    "PO9", "O1", "Oz", "O2", "PO10", "POz",
)


class IntervalPreset(str, Enum):
    """Feature interval sets (ms) for the two stimulation paradigms."""
    VISUAL = "visual"
    AUDITORY = "auditory"

    @property
    def intervals(self) -> tuple[tuple[float, float], ...]:
        if self is IntervalPreset.AUDITORY:
            return (
                (100.0, 180.0), (181.0, 300.0), (301.0, 400.0),
                (401.0, 600.0), (601.0, 850.0), (851.0, 1200.0),
            )
        return (
            (50.0, 120.0), (121.0, 200.0), (201.0, 280.0),
            (281.0, 380.0), (381.0, 530.0), (531.0, 700.0),
        )

    @property
    def window(self) -> tuple[float, float]:
        if self is IntervalPreset.AUDITORY:
            return (-200.0, 1200.0)
        return DEFAULT_WINDOW_MS


DEFAULT_INTERVALS = IntervalPreset.VISUAL.intervals


# ---------------------------------------------------------------------------
# Filter specification
# ---------------------------------------------------------------------------


class FilterSpec(BaseModel):
    """
    Chebyshev Type II band-pass specification.

    ``edges`` selects how ``low_hz``/``high_hz`` are read: ``"passband"``
    treats them as the -3 dB points of the pass band, ``"stopband"`` hands
    them to the Type II design unchanged, where they mark the start of the
    stop bands.
    """
    model_config = ConfigDict(frozen=True)

    order: int = Field(3, ge=1, le=12, description="Prototype order (band-pass order is 2x)")
    low_hz: float = Field(0.5, gt=0.0)
    high_hz: float = Field(8.0, gt=0.0)
    family: Literal["cheby2"] = "cheby2"
    stopband_attenuation_db: float = Field(40.0, gt=0.0)
    edges: Literal["passband", "stopband"] = "passband"

    @model_validator(mode="after")
    def _check_band(self) -> "FilterSpec":
        if not self.low_hz < self.high_hz:
            raise ValueError(
                f"band must satisfy low < high, got [{self.low_hz}, {self.high_hz}] Hz"
            )
        return self

    def check_rate(self, rate: float) -> None:
        if rate <= 0:
            raise ValueError(f"sampling rate must be positive, got {rate}")
        if self.high_hz >= rate / 2.0:
            raise ValueError(
                f"band edge {self.high_hz} Hz is not below the Nyquist frequency {rate / 2.0} Hz"
            )


# ---------------------------------------------------------------------------
# Recordings and epochs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Marker:
    """Stimulus onset. ``label`` is +1 (target), -1 (non-target) or None."""
    sample_index: int
    symbol: int | None = None
    group: int | None = None
    label: int | None = None


@dataclass(frozen=True)
class ContinuousRecording:
    samples: np.ndarray
    rate: float
    channel_names: tuple[str, ...]
    markers: tuple[Marker, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        samples = np.array(self.samples, dtype=float)
        if samples.ndim != 2:
            raise DimensionMismatchError(f"samples must be channels x time, got {samples.shape}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "channel_names", tuple(self.channel_names))
        object.__setattr__(self, "markers", tuple(self.markers))
        if self.rate <= 0:
            raise ValueError(f"rate must be positive, got {self.rate}")
        if len(self.channel_names) != samples.shape[0]:
            raise DimensionMismatchError(
                f"{len(self.channel_names)} channel names for {samples.shape[0]} channels"
            )
        previous = -1
        for m in self.markers:
            if m.sample_index <= previous:
                raise ValueError(f"markers must be strictly increasing (at index {m.sample_index})")
            if not 0 <= m.sample_index < samples.shape[1]:
                raise ValueError(
                    f"marker index {m.sample_index} outside recording of {samples.shape[1]} samples"
                )
            previous = m.sample_index

    @property
    def n_channels(self) -> int:
        return int(self.samples.shape[0])

    @property
    def n_samples(self) -> int:
        return int(self.samples.shape[1])

    def with_samples(self, samples: np.ndarray) -> "ContinuousRecording":
        return ContinuousRecording(samples, self.rate, self.channel_names, self.markers)


@dataclass(frozen=True)
class Epoch:
    """Channels × window samples; sample ``k`` sits at ``start_ms + k * 1000 / rate``."""
    samples: np.ndarray
    start_ms: float
    rate: float
    channel_names: tuple[str, ...]
    marker: Marker | None = None

    def __post_init__(self) -> None:
        samples = np.array(self.samples, dtype=float)
        if samples.ndim != 2:
            raise DimensionMismatchError(f"epoch samples must be 2-D, got {samples.shape}")
        if samples.shape[1] < 2:
            raise ValueError("an epoch needs at least two samples")
        if len(self.channel_names) != samples.shape[0]:
            raise DimensionMismatchError(
                f"{len(self.channel_names)} channel names for {samples.shape[0]} channels"
            )
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "channel_names", tuple(self.channel_names))

    @property
    def times_ms(self) -> np.ndarray:
        return self.start_ms + np.arange(self.samples.shape[1]) * 1000.0 / self.rate

    @property
    def end_ms(self) -> float:
        return float(self.times_ms[-1])

    def channel_index(self, name: str) -> int:
        try:
            return self.channel_names.index(name)
        except ValueError:
            raise KeyError(f"channel {name!r} not in epoch") from None

    def with_samples(self, samples: np.ndarray) -> "Epoch":
        return Epoch(samples, self.start_ms, self.rate, self.channel_names, self.marker)


@dataclass(frozen=True)
class FeatureVector:
    """
    Interval-mean features, laid out interval-major:
    ``index = interval_index * n_channels + channel_index``.
    """
    values: np.ndarray
    intervals: tuple[tuple[float, float], ...]
    channel_names: tuple[str, ...]
    marker: Marker | None = None

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        expected = len(self.intervals) * len(self.channel_names)
        if values.shape != (expected,):
            raise DimensionMismatchError(
                f"feature vector of shape {values.shape} does not match "
                f"{len(self.intervals)} intervals x {len(self.channel_names)} channels"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("feature values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "intervals", tuple(tuple(iv) for iv in self.intervals))
        object.__setattr__(self, "channel_names", tuple(self.channel_names))

    def __array__(self, dtype: object = None, copy: object = None) -> np.ndarray:
        return np.asarray(self.values, dtype=dtype)  # type: ignore[call-overload]

    def __len__(self) -> int:
        return int(self.values.shape[0])

    @property
    def layout(self) -> list[tuple[int, int]]:
        n_ch = len(self.channel_names)
        return [(i // n_ch, i % n_ch) for i in range(len(self))]

    def names(self) -> list[str]:
        return feature_names(len(self.intervals), self.channel_names)


def feature_names(n_intervals: int, channel_names: tuple[str, ...] | list[str]) -> list[str]:
    """Column names in feature order, e.g. ``i0_F7``."""
    return [f"i{i}_{ch}" for i in range(n_intervals) for ch in channel_names]


# ---------------------------------------------------------------------------
# Pipeline settings
# ---------------------------------------------------------------------------


class PreprocessingSettings(BaseModel):
    """Everything needed to turn a raw recording into feature vectors."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    filter: FilterSpec = Field(default_factory=FilterSpec)
    target_rate_hz: float = Field(100.0, gt=0.0)
    preset: IntervalPreset = IntervalPreset.VISUAL
    window_ms: tuple[float, float] | None = Field(None, description="Defaults to the preset's window")
    baseline_ms: tuple[float, float] = DEFAULT_BASELINE_MS
    intervals: tuple[tuple[float, float], ...] | None = Field(
        None, description="Defaults to the preset's intervals"
    )
    excluded_channels: tuple[str, ...] = DEFAULT_EXCLUDED_CHANNELS

    @property
    def effective_window(self) -> tuple[float, float]:
        return self.window_ms or self.preset.window

    @property
    def effective_intervals(self) -> tuple[tuple[float, float], ...]:
        return self.intervals or self.preset.intervals
