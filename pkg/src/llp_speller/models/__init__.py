from .mixing import ClassMeans, GroupMeans, InverseCoefficients, MixingMatrix
from .sequence import (
    DEFAULT_SENTENCE,
    SequenceSpec,
    Stimulus,
    SymbolGrid,
    Trial,
    TrialStimulus,
    speller_design,
)
from .session import CharacterOutcome, ClassifierSnapshot, SessionConfig, SessionResult
from .signal import (
    DEFAULT_INTERVALS,
    DEFAULT_MONTAGE,
    ContinuousRecording,
    Epoch,
    FeatureVector,
    FilterSpec,
    IntervalPreset,
    Marker,
)

__all__ = [
    "CharacterOutcome",
    "ClassMeans",
    "ClassifierSnapshot",
    "ContinuousRecording",
    "DEFAULT_INTERVALS",
    "DEFAULT_MONTAGE",
    "DEFAULT_SENTENCE",
    "Epoch",
    "FeatureVector",
    "FilterSpec",
    "GroupMeans",
    "IntervalPreset",
    "InverseCoefficients",
    "Marker",
    "MixingMatrix",
    "SequenceSpec",
    "SessionConfig",
    "SessionResult",
    "Stimulus",
    "SymbolGrid",
    "Trial",
    "TrialStimulus",
    "speller_design",
]
