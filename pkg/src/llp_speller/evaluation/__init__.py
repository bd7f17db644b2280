from .crossval import chronological_cv, fold_aucs, fold_slices, supervised_trainer
from .homogeneity import HomogeneityEntry, HomogeneityReport, bootstrap_homogeneity
from .metrics import (
    RAMP_UP_CHARACTERS,
    AccuracyReport,
    ScoredSet,
    accuracy_report,
    auc,
    auc_of,
    character_accuracy,
    signed_r2,
    square_loss_identity,
)
from .neuro import NeurophysiologyRow, PeakFeatures, average_epoch, neurophysiology_row, peak_features

__all__ = [
    "AccuracyReport",
    "HomogeneityEntry",
    "HomogeneityReport",
    "NeurophysiologyRow",
    "PeakFeatures",
    "RAMP_UP_CHARACTERS",
    "ScoredSet",
    "accuracy_report",
    "auc",
    "auc_of",
    "average_epoch",
    "bootstrap_homogeneity",
    "character_accuracy",
    "chronological_cv",
    "fold_aucs",
    "fold_slices",
    "neurophysiology_row",
    "peak_features",
    "signed_r2",
    "square_loss_identity",
    "supervised_trainer",
]
