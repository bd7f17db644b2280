from __future__ import annotations

from typing import TYPE_CHECKING

from .mean_map import (
    compose_group_means,
    gram_determinant,
    mixing_from_specs,
    noise_amplification,
    pseudoinverse,
    reconstruct_means,
)

if TYPE_CHECKING:
    from ..models.mixing import MixingMatrix
    from ..validator.conformance import ValidationResult


def validate_mixing(m: MixingMatrix) -> ValidationResult:
    """Shortcut for ``MixingValidator().validate(m)``."""
    from ..validator.conformance import MixingValidator

    return MixingValidator().validate(m)


__all__ = [
    "compose_group_means",
    "gram_determinant",
    "mixing_from_specs",
    "noise_amplification",
    "pseudoinverse",
    "reconstruct_means",
    "validate_mixing",
]
