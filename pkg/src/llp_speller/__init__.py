"""
llp-speller – Learning from label proportions for ERP spellers
===============================================================
Unsupervised decoding of event-related potentials. Stimulus sequences are
built so that each sequence group carries a known proportion of target
stimuli; class-mean responses are then reconstructed from group means and
plugged into a shrinkage LDA that calibrates itself while the user spells.

Quick Start::

    from llp_speller import (
        MixingMatrix, SyntheticModel, SessionConfig,
        noise_amplification, pseudoinverse, simulate_session,
    )

    pi = MixingMatrix.speller()
    print(noise_amplification(pi))          # 38.3
    print(pseudoinverse(pi).nu.round(2))    # [[ 3.37 -2.37] [-0.42  1.42]]

    model = SyntheticModel.default(seed=0, snr_scale=1.0)
    result = simulate_session(model, SessionConfig(seed=7), mixing=pi)
    print(sum(o.online_correct for o in result.outcomes), "of", len(result.outcomes))
"""

__version__ = "0.3.0"

from .errors import (
    ConvergenceError,
    DimensionMismatchError,
    FormatError,
    GenerationError,
    InsufficientDataError,
    LLPError,
    SingularMixingError,
)

# Models
from .models.mixing import ClassMeans, GroupMeans, InverseCoefficients, MixingMatrix
from .models.sequence import SequenceSpec, Stimulus, SymbolGrid, Trial, TrialStimulus
from .models.session import CharacterOutcome, ClassifierSnapshot, SessionConfig, SessionResult
from .models.signal import (
    ContinuousRecording,
    Epoch,
    FeatureVector,
    FilterSpec,
    IntervalPreset,
    Marker,
    PreprocessingSettings,
)

# Mean map
from .mixing import noise_amplification, pseudoinverse, reconstruct_means, validate_mixing

# Sequence design
from .builder.trial_builder import SequenceBuilder, TrialBuilder, generate_sequence, label_stimuli
from .validator.conformance import (
    MixingValidator,
    Severity,
    TrialValidator,
    ValidationIssue,
    ValidationResult,
    validate_trial,
)

# Signal chain
from .preprocessing import (
    apply_filter,
    baseline_correct,
    design_bandpass,
    extract_epochs,
    interval_features,
    preprocess_recording,
)

# Decoder
from .decoder import (
    LinearClassifier,
    OnlineLLPState,
    ScatterMoments,
    posthoc_reanalyze,
    select_symbol,
    shrink_covariance,
    train_llp,
    train_supervised,
    update_state,
)

# Simulation and evaluation
from .simulation import (
    SyntheticModel,
    assemble_artificial,
    calibrate_snr,
    naf_sweep,
    replay_session,
    sample_epoch,
    simulate_session,
)
from .evaluation import (
    accuracy_report,
    auc,
    bootstrap_homogeneity,
    chronological_cv,
    signed_r2,
    square_loss_identity,
)

from .config import ExperimentConfig, load_config

__all__ = [
    # Errors
    "ConvergenceError",
    "DimensionMismatchError",
    "FormatError",
    "GenerationError",
    "InsufficientDataError",
    "LLPError",
    "SingularMixingError",
    # Models
    "CharacterOutcome",
    "ClassMeans",
    "ClassifierSnapshot",
    "ContinuousRecording",
    "Epoch",
    "FeatureVector",
    "FilterSpec",
    "GroupMeans",
    "IntervalPreset",
    "InverseCoefficients",
    "Marker",
    "MixingMatrix",
    "PreprocessingSettings",
    "SequenceSpec",
    "SessionConfig",
    "SessionResult",
    "Stimulus",
    "SymbolGrid",
    "Trial",
    "TrialStimulus",
    # Mean map
    "noise_amplification",
    "pseudoinverse",
    "reconstruct_means",
    "validate_mixing",
    # Sequence design
    "SequenceBuilder",
    "TrialBuilder",
    "generate_sequence",
    "label_stimuli",
    "MixingValidator",
    "Severity",
    "TrialValidator",
    "ValidationIssue",
    "ValidationResult",
    "validate_trial",
    # Signal chain
    "apply_filter",
    "baseline_correct",
    "design_bandpass",
    "extract_epochs",
    "interval_features",
    "preprocess_recording",
    # Decoder
    "LinearClassifier",
    "OnlineLLPState",
    "ScatterMoments",
    "posthoc_reanalyze",
    "select_symbol",
    "shrink_covariance",
    "train_llp",
    "train_supervised",
    "update_state",
    # Simulation and evaluation
    "SyntheticModel",
    "assemble_artificial",
    "calibrate_snr",
    "naf_sweep",
    "replay_session",
    "sample_epoch",
    "simulate_session",
    "accuracy_report",
    "auc",
    "bootstrap_homogeneity",
    "chronological_cv",
    "signed_r2",
    "square_loss_identity",
    # Configuration
    "ExperimentConfig",
    "load_config",
]
