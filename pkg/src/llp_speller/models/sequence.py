"""
Sequence Model
==============
Pydantic models for the speller layout and its stimulation structure: the
symbol grid with visual blanks, highlight events (stimuli), the two sequence
types with fixed target ratios, and trials that interleave them.

Structural rules (12 highlights, appearance counts, double flashes,
decodability) are checked by :class:`llp_speller.validator.TrialValidator`,
not on construction, so malformed trials can be loaded and reported on.

Example::

    from llp_speller.models.sequence import SymbolGrid, SequenceSpec

    grid = SymbolGrid.speller()
    grid.label(grid.symbol_id("A"))       # "A"
    SequenceSpec.type1().target_ratio     # 0.375
"""

from __future__ import annotations

from functools import cached_property

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

DEFAULT_SENTENCE = "FRANZY JAGT IM KOMPLETT VERWAHRLOSTEN TAXI QUER DURCH FREIBURG."

_SPELLER_LAYOUT: tuple[str, ...] = (
    "A", "B", "C", "D", "E", "F", "#",
    "G", "H", "#", "I", "J", "K", "L",
    "M", "N", "O", "P", "#", "Q", "R",
    "S", "#", "T", "U", "V", "W", "#",
    "X", "Y", "Z", "#", "_", ".", ",",
    "#", "!", "?", "<", "#", "#", "#",
)


# ---------------------------------------------------------------------------
# Grid
# ---------------------------------------------------------------------------


class SymbolGrid(BaseModel):
    """
    Row-major grid of symbol labels. Cells labelled with ``blank_symbol``
    are visual blanks: they are highlighted to keep stimulus brightness
    constant but can never be chosen.

    Symbol ids are cell indices (``row * cols + col``).
    """
    model_config = ConfigDict(frozen=True)

    rows: int = Field(6, ge=1)
    cols: int = Field(7, ge=1)
    symbols: tuple[str, ...] = Field(_SPELLER_LAYOUT, description="Row-major cell labels")
    blank_symbol: str = Field("#", min_length=1)
    space_symbol: str = Field("_", description="Label standing in for a space in sentences")

    @model_validator(mode="after")
    def _check_shape(self) -> "SymbolGrid":
        if len(self.symbols) != self.rows * self.cols:
            raise ValueError(
                f"grid of {self.rows}x{self.cols} needs {self.rows * self.cols} symbols, "
                f"got {len(self.symbols)}"
            )
        if len(self.selectable) < 2:
            raise ValueError("grid needs at least two selectable symbols")
        labels = [s for s in self.symbols if s != self.blank_symbol]
        if len(set(labels)) != len(labels):
            raise ValueError("selectable symbol labels must be unique")
        return self

    @classmethod
    def speller(cls) -> "SymbolGrid":
        """The 6x7 speller: 32 selectable symbols and 10 blanks."""
        return cls()

    @property
    def n_cells(self) -> int:
        return self.rows * self.cols

    @cached_property
    def selectable(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.symbols) if s != self.blank_symbol)

    @cached_property
    def blanks(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.symbols) if s == self.blank_symbol)

    def is_selectable(self, symbol_id: int) -> bool:
        return 0 <= symbol_id < self.n_cells and self.symbols[symbol_id] != self.blank_symbol

    def position(self, symbol_id: int) -> tuple[int, int]:
        return divmod(symbol_id, self.cols)

    def neighbours(self, symbol_id: int) -> list[int]:
        """4-neighbourhood of a cell."""
        r, c = self.position(symbol_id)
        out = []
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            rr, cc = r + dr, c + dc
            if 0 <= rr < self.rows and 0 <= cc < self.cols:
                out.append(rr * self.cols + cc)
        return out

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Boolean cell-by-cell matrix of 4-neighbour pairs."""
        adj = np.zeros((self.n_cells, self.n_cells), dtype=bool)
        for i in range(self.n_cells):
            adj[i, self.neighbours(i)] = True
        return adj

    def label(self, symbol_id: int) -> str:
        return self.symbols[symbol_id]

    def symbol_id(self, label: str) -> int:
        if label == self.blank_symbol:
            raise ValueError("blank cells cannot be addressed by label")
        try:
            return self.symbols.index(label)
        except ValueError:
            raise KeyError(f"symbol {label!r} not on the grid") from None

    def encode(self, text: str) -> list[int]:
        """Map a sentence to symbol ids (upper-cased, spaces to ``space_symbol``)."""
        out = []
        for ch in text.upper():
            out.append(self.symbol_id(self.space_symbol if ch == " " else ch))
        return out

    def decode(self, symbol_ids: list[int]) -> str:
        return "".join(
            " " if self.symbols[i] == self.space_symbol else self.symbols[i] for i in symbol_ids
        )


# ---------------------------------------------------------------------------
# Stimuli and sequences
# ---------------------------------------------------------------------------


class Stimulus(BaseModel):
    """One highlight event: the set of cells lit together."""
    model_config = ConfigDict(frozen=True)

    highlighted: tuple[int, ...] = Field(..., description="Sorted, unique cell ids")

    @field_validator("highlighted", mode="before")
    @classmethod
    def _sorted_unique(cls, v: object) -> object:
        if isinstance(v, (list, tuple, set, frozenset)):
            ids = [int(x) for x in v]
            if len(set(ids)) != len(ids):
                raise ValueError("a stimulus may highlight each cell only once")
            return tuple(sorted(ids))
        return v

    def __contains__(self, symbol_id: object) -> bool:
        return symbol_id in self.highlighted

    def __len__(self) -> int:
        return len(self.highlighted)


class SequenceSpec(BaseModel):
    """
    A block of ``length`` stimuli in which every selectable symbol is lit
    exactly ``appearances`` times, so the attended symbol is a target in
    ``appearances / length`` of the block.
    """
    model_config = ConfigDict(frozen=True)

    length: int = Field(..., ge=1)
    appearances: int = Field(..., ge=1)
    group: int = Field(..., ge=1, description="1-based group tag used by the decoder")

    @model_validator(mode="after")
    def _check(self) -> "SequenceSpec":
        if self.appearances > self.length:
            raise ValueError("appearances cannot exceed sequence length")
        return self

    @classmethod
    def type1(cls) -> "SequenceSpec":
        return cls(length=8, appearances=3, group=1)

    @classmethod
    def type2(cls) -> "SequenceSpec":
        return cls(length=18, appearances=2, group=2)

    @property
    def target_ratio(self) -> float:
        return self.appearances / self.length


def speller_design() -> tuple[SequenceSpec, ...]:
    """Four 8-with-3 sequences followed by two 18-with-2 sequences (68 stimuli)."""
    return (SequenceSpec.type1(),) * 4 + (SequenceSpec.type2(),) * 2


class TrialStimulus(Stimulus):
    """A stimulus placed in a trial, tagged with its group and source sequence."""
    group: int = Field(..., ge=1)
    sequence: int | None = Field(None, ge=0, description="Index into Trial.design")


class Trial(BaseModel):
    """
    All stimuli used to select one character, in presentation order.

    ``design[k]`` is the spec of the sequence whose stimuli carry
    ``sequence == k``.
    """
    model_config = ConfigDict(frozen=True)

    stimuli: tuple[TrialStimulus, ...]
    design: tuple[SequenceSpec, ...] = Field(default_factory=speller_design)
    highlights_per_stimulus: int = Field(12, ge=1)
    soa_ms: float = Field(250.0, gt=0, description="Stimulus onset asynchrony (metadata)")
    flash_ms: float = Field(100.0, gt=0, description="Highlight duration (metadata)")
    seed: int | None = None

    def __len__(self) -> int:
        return len(self.stimuli)

    @property
    def groups(self) -> np.ndarray:
        return np.array([s.group for s in self.stimuli], dtype=int)

    @property
    def n_groups(self) -> int:
        return max(spec.group for spec in self.design)

    def membership(self, n_cells: int) -> np.ndarray:
        """Boolean stimuli × cells matrix, True where the cell is lit."""
        m = np.zeros((len(self.stimuli), n_cells), dtype=bool)
        for k, stim in enumerate(self.stimuli):
            ids = [i for i in stim.highlighted if 0 <= i < n_cells]
            m[k, ids] = True
        return m

    def sequence_positions(self, sequence: int) -> list[int]:
        return [k for k, s in enumerate(self.stimuli) if s.sequence == sequence]

    def to_json_dict(self) -> dict[str, object]:
        return self.model_dump(mode="json", exclude_none=True)
