"""
Session Model
=============
Serializable configuration and results of an online spelling session, plus
the JSON snapshot of a trained classifier.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .sequence import DEFAULT_SENTENCE, SequenceSpec, SymbolGrid, speller_design


class SessionConfig(BaseModel):
    """Settings for one simulated online session."""
    model_config = ConfigDict(frozen=True)

    sentence: str = Field(DEFAULT_SENTENCE, min_length=1)
    grid: SymbolGrid = Field(default_factory=SymbolGrid)
    design: tuple[SequenceSpec, ...] = Field(default_factory=speller_design)
    trials_per_character: int = Field(1, ge=1)
    retrain: Literal["per_character"] = "per_character"
    repetitions: int = Field(1, ge=1, description="Sentence repetitions, decoder reset before each")
    forgetting: float = Field(1.0, gt=0.0, le=1.0, description="Recency weight of the LLP state")
    seed: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _sentence_on_grid(self) -> "SessionConfig":
        self.grid.encode(self.sentence)
        return self

    def symbols(self) -> list[int]:
        return self.grid.encode(self.sentence)


class CharacterOutcome(BaseModel):
    """Decisions and diagnostics for one spelled character."""
    model_config = ConfigDict(frozen=True)

    repetition: int = Field(..., ge=0)
    index: int = Field(..., ge=0, description="Character position within the sentence")
    true_symbol: int
    online_symbol: int
    posthoc_symbol: int
    guessed: bool = Field(False, description="Online decision was a uniform guess (no classifier yet)")
    auc: float | None = Field(None, description="AUC of the deciding classifier on this character's epochs")
    reconstruction_rmse: float | None = Field(
        None, description="RMSE of the reconstructed class-mean difference after this character"
    )

    @property
    def online_correct(self) -> bool:
        return self.online_symbol == self.true_symbol

    @property
    def posthoc_correct(self) -> bool:
        return self.posthoc_symbol == self.true_symbol


class SessionResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    seed: int
    snr_scale: float
    outcomes: tuple[CharacterOutcome, ...]

    def repetition(self, r: int) -> list[CharacterOutcome]:
        return [o for o in self.outcomes if o.repetition == r]

    @property
    def online_decisions(self) -> list[int]:
        return [o.online_symbol for o in self.outcomes]

    @property
    def posthoc_decisions(self) -> list[int]:
        return [o.posthoc_symbol for o in self.outcomes]

    @property
    def truth(self) -> list[int]:
        return [o.true_symbol for o in self.outcomes]


class ClassifierSnapshot(BaseModel):
    """JSON form of a trained linear classifier."""
    model_config = ConfigDict(frozen=True)

    w: tuple[float, ...]
    gamma: float | None = Field(None, ge=0.0, le=1.0)
    d: int = Field(..., ge=1)
    metadata: dict[str, str | int | float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_dimension(self) -> "ClassifierSnapshot":
        if len(self.w) != self.d:
            raise ValueError(f"w has {len(self.w)} entries but d={self.d}")
        return self
