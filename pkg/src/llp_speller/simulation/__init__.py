from .artificial import ArtificialDataset, LabeledPool, assemble_artificial, group_sizes, target_counts
from .model import SyntheticModel, calibrate_snr, calibration_labels, erp_templates, sample_epoch
from .recording import evoked_waveforms, synthesize_recording
from .session import (
    CharacterRecord,
    OnlineSpeller,
    replay_session,
    session_streams,
    simulate_session,
)
from .sweep import SweepRow, candidate_mixings, llp_trainer, naf_sweep, reconstruction_rmse

__all__ = [
    "ArtificialDataset",
    "CharacterRecord",
    "LabeledPool",
    "OnlineSpeller",
    "SweepRow",
    "SyntheticModel",
    "assemble_artificial",
    "calibrate_snr",
    "calibration_labels",
    "candidate_mixings",
    "erp_templates",
    "evoked_waveforms",
    "group_sizes",
    "llp_trainer",
    "naf_sweep",
    "reconstruction_rmse",
    "replay_session",
    "sample_epoch",
    "session_streams",
    "simulate_session",
    "synthesize_recording",
    "target_counts",
]
