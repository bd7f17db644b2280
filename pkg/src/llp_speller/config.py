"""
Experiment Configuration
========================
TOML configuration for the command-line tools. Every field has a default
reproducing the published speller protocol, so an empty file (or no file)
is a valid configuration.

Example ``protocol.toml``::

    [mixing]
    rows = [[0.375, 0.625], [0.1111111111111111, 0.8888888888888888]]

    [session]
    repetitions = 3
    seed = 11

    [model]
    target_auc = 0.97
"""

from __future__ import annotations

import os
import sys
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import FormatError
from .mixing.mean_map import mixing_from_specs
from .models.mixing import MixingMatrix
from .models.sequence import DEFAULT_SENTENCE, SequenceSpec, SymbolGrid, speller_design
from .models.session import SessionConfig
from .models.signal import PreprocessingSettings

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

OUTPUT_ENV_VAR = "LLP_SPELLER_OUT"
DEFAULT_OUTPUT_DIR = Path("llp-output")


class MixingSection(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    rows: tuple[tuple[float, float], ...] = Field(..., min_length=1)
    label: str | None = None

    def matrix(self) -> MixingMatrix:
        return MixingMatrix(rows=self.rows, label=self.label or "config")


class GridSection(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    path: Path | None = Field(None, description="Grid JSON file; the 6x7 speller if omitted")

    @model_validator(mode="after")
    def _path_exists(self) -> "GridSection":
        if self.path is not None and not self.path.is_file():
            raise ValueError(f"grid file {self.path} does not exist")
        return self

    def grid(self) -> SymbolGrid:
        if self.path is None:
            return SymbolGrid.speller()
        from .formats.reader import load_grid

        return load_grid(self.path)


class SessionSection(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    sentence: str = Field(DEFAULT_SENTENCE, min_length=1)
    design: tuple[SequenceSpec, ...] = Field(default_factory=speller_design)
    trials_per_character: int = Field(1, ge=1)
    repetitions: int = Field(1, ge=1)
    forgetting: float = Field(1.0, gt=0.0, le=1.0)
    seed: int = Field(0, ge=0)


class ModelSection(BaseModel):
    """Synthetic generative model; ``snr_scale`` wins over ``target_auc``."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    seed: int = Field(0, ge=0)
    rank: int = Field(5, ge=0)
    loading: float = Field(0.5, ge=0.0)
    snr_scale: float | None = Field(None, ge=0.0)
    target_auc: float = Field(0.97, ge=0.5, lt=1.0)
    calibration_epochs: int = Field(63 * 68, ge=50)


class OutputSection(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    directory: Path | None = None


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    mixing: MixingSection | None = Field(None, description="Derived from the session design if omitted")
    grid: GridSection = Field(default_factory=GridSection)
    session: SessionSection = Field(default_factory=SessionSection)
    model: ModelSection = Field(default_factory=ModelSection)
    preprocessing: PreprocessingSettings = Field(default_factory=PreprocessingSettings)
    output: OutputSection = Field(default_factory=OutputSection)

    def mixing_matrix(self) -> MixingMatrix:
        if self.mixing is not None:
            return self.mixing.matrix()
        return mixing_from_specs(self.session.design)

    def symbol_grid(self) -> SymbolGrid:
        return self.grid.grid()

    def session_config(self, seed: int | None = None) -> SessionConfig:
        s = self.session
        return SessionConfig(
            sentence=s.sentence,
            grid=self.symbol_grid(),
            design=s.design,
            trials_per_character=s.trials_per_character,
            repetitions=s.repetitions,
            forgetting=s.forgetting,
            seed=s.seed if seed is None else seed,
        )

    def output_dir(self, override: str | Path | None = None) -> Path:
        """``override``, then ``[output] directory``, then $LLP_SPELLER_OUT, then ./llp-output."""
        if override is not None:
            return Path(override)
        if self.output.directory is not None:
            return self.output.directory
        env = os.environ.get(OUTPUT_ENV_VAR)
        return Path(env) if env else DEFAULT_OUTPUT_DIR


def _resolve_relative(doc: dict[str, Any], base: Path) -> None:
    grid = doc.get("grid")
    if isinstance(grid, dict) and isinstance(grid.get("path"), str):
        p = Path(grid["path"])
        if not p.is_absolute():
            grid["path"] = str(base / p)


def load_config(path: str | Path | None = None) -> ExperimentConfig:
    """Parse and validate a TOML file; ``None`` yields the defaults."""
    if path is None:
        return ExperimentConfig()
    p = Path(path)
    try:
        with p.open("rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError:
        raise FormatError("config file not found", path=p) from None
    except tomllib.TOMLDecodeError as exc:
        raise FormatError(f"invalid TOML: {exc}", path=p) from exc
    _resolve_relative(doc, p.parent)
    try:
        return ExperimentConfig.model_validate(doc)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(x) for x in first["loc"])
        raise FormatError(f"{where}: {first['msg']}", path=p) from exc
