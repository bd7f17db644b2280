from .conformance import (
    MixingValidator,
    Severity,
    TrialValidator,
    ValidationIssue,
    ValidationResult,
    validate_trial,
)

__all__ = [
    "MixingValidator",
    "Severity",
    "TrialValidator",
    "ValidationIssue",
    "ValidationResult",
    "validate_trial",
]
