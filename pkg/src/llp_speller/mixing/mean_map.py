"""
Mean-Map Algebra
================
Recover class means from group means when only the class proportions of
each group are known.

Every group mean is a mixture ``mu_g = pi_plus[g] * mu_plus + pi_minus[g] * mu_minus``.
Stacking the groups gives ``M = Π · [mu_plus; mu_minus]``, which is solved
with the left pseudoinverse ``ν = (ΠᵀΠ)⁻¹Πᵀ``. The inner matrix is always
2×2, so the solve is a closed-form normal-equation step.

Example::

    from llp_speller.mixing import pseudoinverse, noise_amplification
    from llp_speller.models.mixing import MixingMatrix

    nu = pseudoinverse(MixingMatrix.speller())
    nu.nu                    # [[3.368, -2.368], [-0.421, 1.421]]
    noise_amplification(MixingMatrix.speller())   # 38.30
"""

from __future__ import annotations

import numpy as np

from ..errors import DimensionMismatchError, InsufficientDataError, SingularMixingError
from ..models.mixing import ClassMeans, GroupMeans, InverseCoefficients, MixingMatrix
from ..models.sequence import SequenceSpec

# det(ΠᵀΠ) below this means the two columns are (numerically) collinear.
RANK_THRESHOLD = 1e-10


def gram_determinant(m: MixingMatrix) -> float:
    pi = m.as_array()
    return float(np.linalg.det(pi.T @ pi))


def pseudoinverse(m: MixingMatrix) -> InverseCoefficients:
    """Reconstruction weights ν with ``ν · Π = I``."""
    pi = m.as_array()
    gram = pi.T @ pi
    det = gram[0, 0] * gram[1, 1] - gram[0, 1] * gram[1, 0]
    if abs(det) < RANK_THRESHOLD:
        raise SingularMixingError(
            f"mixing matrix is rank-deficient (det(ΠᵀΠ) = {det:.3g}); "
            "class means cannot be recovered"
        )
    gram_inv = np.array([[gram[1, 1], -gram[0, 1]], [-gram[1, 0], gram[0, 0]]]) / det
    return InverseCoefficients(gram_inv @ pi.T)


def reconstruct_means(nu: InverseCoefficients, g: GroupMeans) -> ClassMeans:
    """Class means as ν-weighted sums of the (unweighted) group means."""
    if nu.n_groups != g.n_groups:
        raise DimensionMismatchError(
            f"coefficients cover {nu.n_groups} groups, group means {g.n_groups}"
        )
    empty = [k + 1 for k, c in enumerate(g.counts) if c <= 0]
    if empty:
        raise InsufficientDataError(f"group(s) {empty} have no samples")
    mu = nu.nu @ g.means
    return ClassMeans(mu_plus=mu[0], mu_minus=mu[1])


def noise_amplification(m: MixingMatrix) -> float:
    """
    Noise amplification factor ``G * ||ν||_F²``.

    With N samples split evenly over G groups, the variance of a reconstructed
    class mean is this factor times the variance of a supervised mean over N
    samples (up to the 1/2 split between classes).
    """
    nu = pseudoinverse(m)
    return float(m.n_groups * np.sum(nu.nu ** 2))


def compose_group_means(m: MixingMatrix, class_means: ClassMeans) -> np.ndarray:
    """Forward model: exact group means ``Π · [mu_plus; mu_minus]`` (G×d)."""
    stacked = np.vstack([class_means.mu_plus, class_means.mu_minus])
    return m.as_array() @ stacked


def mixing_from_specs(specs: tuple[SequenceSpec, ...] | list[SequenceSpec]) -> MixingMatrix:
    """
    Mixing matrix implied by a sequence design, one row per group tag.

    All specs sharing a group tag must share a target ratio.
    """
    ratios: dict[int, float] = {}
    for spec in specs:
        seen = ratios.setdefault(spec.group, spec.target_ratio)
        if abs(seen - spec.target_ratio) > 1e-12:
            raise ValueError(
                f"group {spec.group} mixes target ratios {seen:.4f} and {spec.target_ratio:.4f}"
            )
    groups = sorted(ratios)
    if groups != list(range(1, len(groups) + 1)):
        raise ValueError(f"group tags must be 1..G without gaps, got {groups}")
    return MixingMatrix.from_target_ratios([ratios[g] for g in groups], label="design")
