from .epochs import EpochExtraction, baseline_correct, downsample, extract_epochs, window_offsets
from .features import PreprocessedData, interval_features, preprocess_recording, select_channels
from .filters import (
    apply_filter,
    design_bandpass,
    frequency_response,
    is_stable,
    stopband_edges,
)

__all__ = [
    "EpochExtraction",
    "PreprocessedData",
    "apply_filter",
    "baseline_correct",
    "design_bandpass",
    "downsample",
    "extract_epochs",
    "frequency_response",
    "interval_features",
    "is_stable",
    "preprocess_recording",
    "select_channels",
    "stopband_edges",
    "window_offsets",
]
