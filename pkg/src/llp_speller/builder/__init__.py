from .trial_builder import (
    SequenceBuilder,
    TrialBuilder,
    assemble_trial,
    check_feasible,
    generate_sequence,
    label_stimuli,
)

__all__ = [
    "SequenceBuilder",
    "TrialBuilder",
    "assemble_trial",
    "check_feasible",
    "generate_sequence",
    "label_stimuli",
]
