"""
Mixing Model
============
Types for the mean-map algebra: the mixing matrix of target / non-target
proportions per sequence group, group means, reconstructed class means and
the reconstruction coefficients.

``MixingMatrix`` is a pydantic model because it is exchanged as JSON
(``{"rows": [[p_plus, p_minus], ...]}``). The numeric containers are frozen
dataclasses holding read-only numpy arrays.

Example::

    from llp_speller.models.mixing import MixingMatrix

    pi = MixingMatrix.speller()
    pi.as_array()          # [[0.375, 0.625], [0.111, 0.889]]
    pi.n_groups            # 2
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..errors import DimensionMismatchError


def _frozen(values: np.ndarray | list[float] | list[list[float]], ndim: int, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise DimensionMismatchError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# Mixing matrix
# ---------------------------------------------------------------------------


class MixingMatrix(BaseModel):
    """
    G×2 matrix of class proportions, one row per sequence group.

    Row ``g`` holds ``(pi_plus, pi_minus)``: the share of target and
    non-target stimuli in group ``g``. Structural invariants (row sums,
    range, rank) are checked by ``validate_mixing`` rather than on
    construction, so invalid designs can still be loaded and reported on.
    """
    model_config = ConfigDict(frozen=True)

    rows: tuple[tuple[float, float], ...] = Field(
        ...,
        min_length=1,
        description="Per-group (target proportion, non-target proportion)",
    )
    label: str | None = Field(None, description="Optional name used in reports and sweeps")

    @field_validator("rows", mode="before")
    @classmethod
    def _coerce_fractions(cls, v: object) -> object:
        if isinstance(v, (list, tuple)):
            return tuple(tuple(float(x) for x in row) for row in v)
        return v

    # ------------------------------------------------------------------
    # Factories
    # ------------------------------------------------------------------

    @classmethod
    def speller(cls) -> "MixingMatrix":
        """Mixing of the two-ratio speller: 3 of 8 and 2 of 18 stimuli are targets."""
        return cls.from_fractions(
            [(Fraction(3, 8), Fraction(5, 8)), (Fraction(2, 18), Fraction(16, 18))],
            label="speller",
        )

    @classmethod
    def identity(cls) -> "MixingMatrix":
        """Pure groups: the supervised case."""
        return cls(rows=((1.0, 0.0), (0.0, 1.0)), label="identity")

    @classmethod
    def from_fractions(
        cls, rows: list[tuple[Fraction, Fraction]], label: str | None = None
    ) -> "MixingMatrix":
        return cls(rows=tuple((float(p), float(m)) for p, m in rows), label=label)

    @classmethod
    def from_target_ratios(cls, ratios: list[float], label: str | None = None) -> "MixingMatrix":
        """Build Π from per-group target ratios; non-target share is the complement."""
        return cls(rows=tuple((float(r), 1.0 - float(r)) for r in ratios), label=label)

    # ------------------------------------------------------------------
    # Accessors
    # ------------------------------------------------------------------

    @property
    def n_groups(self) -> int:
        return len(self.rows)

    def as_array(self) -> np.ndarray:
        return np.array(self.rows, dtype=float)

    def permuted(self, order: list[int]) -> "MixingMatrix":
        """Return the matrix with rows reordered (``order[i]`` becomes row ``i``)."""
        return MixingMatrix(rows=tuple(self.rows[i] for i in order), label=self.label)

    def to_json_dict(self) -> dict[str, list[list[float]]]:
        return {"rows": [list(r) for r in self.rows]}

    def __repr__(self) -> str:
        name = f" {self.label!r}" if self.label else ""
        return f"MixingMatrix{name}(G={self.n_groups}, rows={[list(r) for r in self.rows]})"


# ---------------------------------------------------------------------------
# Numeric containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupMeans:
    """Per-group feature means (G×d) with the sample counts behind them."""
    means: np.ndarray
    counts: np.ndarray

    def __post_init__(self) -> None:
        means = _frozen(self.means, 2, "means")
        counts = _frozen(self.counts, 1, "counts")
        if counts.shape[0] != means.shape[0]:
            raise DimensionMismatchError(
                f"{means.shape[0]} group means but {counts.shape[0]} counts"
            )
        if np.any(counts < 0):
            raise ValueError("group counts must be >= 0")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "counts", counts)

    @property
    def n_groups(self) -> int:
        return int(self.means.shape[0])

    @property
    def dimension(self) -> int:
        return int(self.means.shape[1])


@dataclass(frozen=True)
class ClassMeans:
    """Target (``mu_plus``) and non-target (``mu_minus``) mean vectors."""
    mu_plus: np.ndarray
    mu_minus: np.ndarray

    def __post_init__(self) -> None:
        plus = _frozen(self.mu_plus, 1, "mu_plus")
        minus = _frozen(self.mu_minus, 1, "mu_minus")
        if plus.shape != minus.shape:
            raise DimensionMismatchError(
                f"class means differ in dimension: {plus.shape[0]} vs {minus.shape[0]}"
            )
        object.__setattr__(self, "mu_plus", plus)
        object.__setattr__(self, "mu_minus", minus)

    @property
    def dimension(self) -> int:
        return int(self.mu_plus.shape[0])

    @property
    def difference(self) -> np.ndarray:
        return self.mu_plus - self.mu_minus


@dataclass(frozen=True)
class InverseCoefficients:
    """
    2×G reconstruction weights ν.

    Row 0 holds ν_+ (weights producing the target mean), row 1 holds ν_-.
    """
    nu: np.ndarray

    def __post_init__(self) -> None:
        nu = _frozen(self.nu, 2, "nu")
        if nu.shape[0] != 2:
            raise DimensionMismatchError(f"nu must have 2 rows, got {nu.shape[0]}")
        object.__setattr__(self, "nu", nu)

    @property
    def n_groups(self) -> int:
        return int(self.nu.shape[1])

    @property
    def nu_plus(self) -> np.ndarray:
        return self.nu[0]

    @property
    def nu_minus(self) -> np.ndarray:
        return self.nu[1]

    def is_left_inverse_of(self, mixing: MixingMatrix, atol: float = 1e-10) -> bool:
        return bool(np.allclose(self.nu @ mixing.as_array(), np.eye(2), rtol=0.0, atol=atol))
