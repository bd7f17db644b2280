"""
Trial Builder
=============
Fluent builders that generate stimulus sequences with fixed target ratios
and assemble them into interleaved trials.

Generation works on a *timeline*: the presentation order of stimuli, each
slot tagged with the sequence it belongs to. A standalone sequence has a
single-label timeline; a trial draws a random arrangement of the six
sequence labels, which interleaves the sequences while keeping each one in
order. Slots are then filled in presentation order:

1. every slot gets a quota of selectable symbols so that each sequence can
   light every selectable symbol exactly ``appearances`` times; blanks make
   up the rest of the 12 highlights;
2. symbols are drawn greedily, weighted by how urgently they still need to
   appear in the slot's sequence, avoiding symbols lit in the previous slot;
   of several candidate draws the one with the fewest grid-adjacent pairs
   is kept;
3. remaining double flashes are repaired by swapping symbols between two
   slots of the same sequence, which preserves all appearance counts;
4. trials whose selectable symbols do not all have distinct stimulus
   patterns are discarded.

Any failed step restarts with fresh randomness, up to ``max_restarts``.

Example::

    from llp_speller.builder import TrialBuilder

    trial = TrialBuilder.speller().with_seed(7).build()
    len(trial)            # 68
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import GenerationError
from ..models.sequence import (
    SequenceSpec,
    Stimulus,
    SymbolGrid,
    Trial,
    TrialStimulus,
    speller_design,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_RESTARTS = 10_000


# ---------------------------------------------------------------------------
# Feasibility
# ---------------------------------------------------------------------------


def check_feasible(
    grid: SymbolGrid,
    specs: Sequence[SequenceSpec],
    highlights: int = 12,
    *,
    contiguous: bool = False,
) -> None:
    """
    Raise :class:`GenerationError` if no assignment can satisfy the design.

    ``contiguous`` marks a standalone sequence whose stimuli are shown back
    to back, which caps appearances at ``ceil(length / 2)``.
    """
    n_sel, n_blank = len(grid.selectable), len(grid.blanks)
    problems: list[str] = []
    if highlights > grid.n_cells:
        problems.append(f"{highlights} highlights exceed {grid.n_cells} grid cells")
    for k, spec in enumerate(specs):
        slots = spec.length * highlights
        demand = spec.appearances * n_sel
        base, extra = divmod(demand, spec.length)
        if demand > slots:
            problems.append(
                f"spec {k}: {demand} selectable appearances exceed {slots} slots"
            )
        elif base + (1 if extra else 0) > min(highlights, n_sel):
            problems.append(f"spec {k}: a stimulus would need {base + 1} selectable symbols")
        if highlights - base > n_blank:
            problems.append(
                f"spec {k}: stimuli need {highlights - base} blanks but the grid has {n_blank}"
            )
        if contiguous and spec.appearances > math.ceil(spec.length / 2):
            problems.append(
                f"spec {k}: {spec.appearances} appearances in {spec.length} consecutive "
                "stimuli force a double flash"
            )
    if problems:
        raise GenerationError(
            "infeasible sequence design: " + "; ".join(problems),
            diagnostics={"problems": problems, "highlights": highlights},
        )


# ---------------------------------------------------------------------------
# Timeline filler
# ---------------------------------------------------------------------------


@dataclass
class _Outcome:
    selected: list[set[int]] | None
    reason: str = ""
    conflicts: int = 0


@dataclass
class _TimelineFiller:
    grid: SymbolGrid
    specs: Sequence[SequenceSpec]
    highlights: int
    n_candidates: int
    max_repair_steps: int
    rng: np.random.Generator
    _sel: np.ndarray = field(init=False)
    _adjacency: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        self._sel = np.array(self.grid.selectable, dtype=int)
        self._adjacency = self.grid.adjacency[np.ix_(self._sel, self._sel)]

    # Quotas -------------------------------------------------------------

    def _quotas(self, timeline: list[int]) -> list[int]:
        quota = [0] * len(timeline)
        n_sel = len(self._sel)
        for k, spec in enumerate(self.specs):
            positions = [p for p, lab in enumerate(timeline) if lab == k]
            base, extra = divmod(spec.appearances * n_sel, spec.length)
            bumped = set(self.rng.choice(len(positions), size=extra, replace=False).tolist())
            for i, p in enumerate(positions):
                quota[p] = base + (1 if i in bumped else 0)
        return quota

    # Construction -------------------------------------------------------

    def fill(self, timeline: list[int]) -> _Outcome:
        n_slots = len(timeline)
        quota = self._quotas(timeline)
        need = np.array([[spec.appearances] * len(self._sel) for spec in self.specs], dtype=int)
        left = np.array([spec.length for spec in self.specs], dtype=int)
        selected: list[set[int]] = []
        prev: set[int] = set()

        for p in range(n_slots):
            k = timeline[p]
            q = quota[p]
            cand = np.flatnonzero(need[k] > 0)
            forced_mask = need[k, cand] >= left[k]
            forced = cand[forced_mask]
            optional = cand[~forced_mask]
            m = q - len(forced)
            if m < 0 or m > len(optional):
                return _Outcome(None, "construction")

            chosen = set(forced.tolist())
            if m > 0:
                chosen |= self._draw(optional, m, need[k, optional] / left[k], prev, timeline, p, need, left)

            selected.append(chosen)
            idx = np.fromiter(chosen, dtype=int, count=len(chosen))
            need[k, idx] -= 1
            left[k] -= 1
            prev = chosen

        if not self._repair(selected, timeline):
            return _Outcome(None, "double-flash repair", self._count_conflicts(selected))
        return _Outcome(selected)

    def _draw(
        self,
        optional: np.ndarray,
        m: int,
        weights: np.ndarray,
        prev: set[int],
        timeline: list[int],
        p: int,
        need: np.ndarray,
        left: np.ndarray,
    ) -> set[int]:
        w = weights.astype(float).copy()
        in_prev = np.fromiter((s in prev for s in optional), dtype=bool, count=len(optional))
        w[in_prev] *= 1e-3
        if p + 1 < len(timeline):
            k_next = timeline[p + 1]
            if k_next != timeline[p]:
                # symbols the next slot must take would collide with it
                w[need[k_next, optional] >= left[k_next]] *= 0.05
        keys = np.log(w) + self.rng.gumbel(size=(self.n_candidates, len(optional)))
        picks = np.argsort(-keys, axis=1)[:, :m]

        best: set[int] = set()
        best_score = math.inf
        for row in picks:
            members = optional[row]
            clash = sum(1 for s in members if s in prev)
            score = 100 * clash + self._adjacent_pairs(members)
            if score < best_score:
                best, best_score = set(members.tolist()), score
        return best

    def _adjacent_pairs(self, members: np.ndarray) -> int:
        return int(self._adjacency[np.ix_(members, members)].sum()) // 2

    # Repair -------------------------------------------------------------

    @staticmethod
    def _count_conflicts(selected: list[set[int]]) -> int:
        return sum(len(selected[p] & selected[p + 1]) for p in range(len(selected) - 1))

    def _repair(self, selected: list[set[int]], timeline: list[int]) -> bool:
        n_slots = len(selected)
        positions: dict[int, list[int]] = {}
        for p, k in enumerate(timeline):
            positions.setdefault(k, []).append(p)

        def around(sym: int, x: int, exclude: int = -1) -> int:
            c = 0
            if x > 0 and x - 1 != exclude and sym in selected[x - 1]:
                c += 1
            if x + 1 < n_slots and x + 1 != exclude and sym in selected[x + 1]:
                c += 1
            return c

        for _ in range(self.max_repair_steps):
            conflicts = [
                (p, s) for p in range(n_slots - 1) for s in selected[p] & selected[p + 1]
            ]
            if not conflicts:
                return True
            p, s = conflicts[int(self.rng.integers(len(conflicts)))]
            at = p if self.rng.random() < 0.5 else p + 1

            moves: list[tuple[int, int, int]] = []
            for p2 in positions[timeline[at]]:
                if p2 == at or s in selected[p2]:
                    continue
                gain = around(s, p2, exclude=at) - around(s, at)
                for b in selected[p2]:
                    if b in selected[at]:
                        continue
                    moves.append((gain - around(b, p2) + around(b, at, exclude=p2), p2, b))
            if not moves:
                continue
            if self.rng.random() < 0.1:
                _, p2, b = moves[int(self.rng.integers(len(moves)))]
            else:
                lowest = min(mv[0] for mv in moves)
                ties = [mv for mv in moves if mv[0] == lowest]
                _, p2, b = ties[int(self.rng.integers(len(ties)))]
            selected[at].discard(s)
            selected[at].add(b)
            selected[p2].discard(b)
            selected[p2].add(s)
        return self._count_conflicts(selected) == 0

    # Output -------------------------------------------------------------

    def highlighted(self, selected: list[set[int]]) -> list[list[int]]:
        """Map selectable indices to cell ids and add blanks up to ``highlights``."""
        blanks = np.array(self.grid.blanks, dtype=int)
        out = []
        for chosen in selected:
            cells = self._sel[sorted(chosen)].tolist()
            n_blank = self.highlights - len(cells)
            if n_blank:
                cells += blanks[self.rng.choice(len(blanks), size=n_blank, replace=False)].tolist()
            out.append(sorted(cells))
        return out

    def decodable(self, selected: list[set[int]]) -> bool:
        patterns = {
            tuple(p for p, chosen in enumerate(selected) if j in chosen)
            for j in range(len(self._sel))
        }
        return len(patterns) == len(self._sel)


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------


class _GeneratorSettings:
    def __init__(self, grid: SymbolGrid | None) -> None:
        self._grid = grid or SymbolGrid.speller()
        self._seed: int | None = None
        self._highlights = 12
        self._candidates = 4
        self._max_restarts = DEFAULT_MAX_RESTARTS
        self._max_repair_steps = 2_000

    def _filler(self, specs: Sequence[SequenceSpec], rng: np.random.Generator) -> _TimelineFiller:
        return _TimelineFiller(
            grid=self._grid,
            specs=specs,
            highlights=self._highlights,
            n_candidates=self._candidates,
            max_repair_steps=self._max_repair_steps,
            rng=rng,
        )


class SequenceBuilder(_GeneratorSettings):
    """
    Fluent builder for a standalone sequence.

    Example::

        stimuli = SequenceBuilder(SequenceSpec.type2()).with_seed(3).build()
    """

    def __init__(self, spec: SequenceSpec, grid: SymbolGrid | None = None) -> None:
        super().__init__(grid)
        self._spec = spec

    @classmethod
    def type1(cls, grid: SymbolGrid | None = None) -> "SequenceBuilder":
        return cls(SequenceSpec.type1(), grid)

    @classmethod
    def type2(cls, grid: SymbolGrid | None = None) -> "SequenceBuilder":
        return cls(SequenceSpec.type2(), grid)

    def with_seed(self, seed: int | None) -> "SequenceBuilder":
        self._seed = seed
        return self

    def with_highlights(self, n: int) -> "SequenceBuilder":
        self._highlights = n
        return self

    def with_max_restarts(self, n: int) -> "SequenceBuilder":
        self._max_restarts = n
        return self

    def build(self) -> list[Stimulus]:
        check_feasible(self._grid, [self._spec], self._highlights, contiguous=True)
        rng = np.random.default_rng(self._seed)
        filler = self._filler([self._spec], rng)
        timeline = [0] * self._spec.length
        reason = ""
        for attempt in range(1, self._max_restarts + 1):
            outcome = filler.fill(timeline)
            if outcome.selected is not None:
                return [Stimulus(highlighted=h) for h in filler.highlighted(outcome.selected)]
            reason = outcome.reason
            logger.debug("sequence attempt %d failed: %s", attempt, reason)
        raise GenerationError(
            f"no valid sequence after {self._max_restarts} restarts",
            diagnostics={"spec": self._spec.model_dump(), "last_failure": reason},
        )


class TrialBuilder(_GeneratorSettings):
    """
    Fluent builder for interleaved trials.

    Example::

        trial = (
            TrialBuilder.speller()
            .with_seed(42)
            .with_candidates(6)
            .build()
        )
    """

    def __init__(self, grid: SymbolGrid | None = None) -> None:
        super().__init__(grid)
        self._design: tuple[SequenceSpec, ...] = speller_design()
        self._soa_ms = 250.0
        self._flash_ms = 100.0

    @classmethod
    def speller(cls, grid: SymbolGrid | None = None) -> "TrialBuilder":
        """Four 8-with-3 and two 18-with-2 sequences on the 6x7 grid."""
        return cls(grid)

    def with_design(self, specs: Sequence[SequenceSpec]) -> "TrialBuilder":
        self._design = tuple(specs)
        return self

    def with_seed(self, seed: int | None) -> "TrialBuilder":
        self._seed = seed
        return self

    def with_highlights(self, n: int) -> "TrialBuilder":
        self._highlights = n
        return self

    def with_candidates(self, n: int) -> "TrialBuilder":
        """Number of candidate draws scored for grid adjacency per stimulus."""
        self._candidates = max(1, n)
        return self

    def with_max_restarts(self, n: int) -> "TrialBuilder":
        self._max_restarts = n
        return self

    def with_timing(self, soa_ms: float, flash_ms: float) -> "TrialBuilder":
        self._soa_ms = soa_ms
        self._flash_ms = flash_ms
        return self

    def build(self) -> Trial:
        if not self._design:
            raise GenerationError("trial design has no sequences")
        check_feasible(self._grid, self._design, self._highlights)
        rng = np.random.default_rng(self._seed)
        filler = self._filler(self._design, rng)
        labels = np.concatenate([np.full(spec.length, k) for k, spec in enumerate(self._design)])
        failures: dict[str, int] = {}

        for attempt in range(1, self._max_restarts + 1):
            timeline = rng.permutation(labels).tolist()
            outcome = filler.fill(timeline)
            if outcome.selected is None:
                failures[outcome.reason] = failures.get(outcome.reason, 0) + 1
                logger.debug("trial attempt %d failed: %s", attempt, outcome.reason)
                continue
            if not filler.decodable(outcome.selected):
                failures["decodability"] = failures.get("decodability", 0) + 1
                continue
            stimuli = tuple(
                TrialStimulus(highlighted=cells, group=self._design[k].group, sequence=k)
                for cells, k in zip(filler.highlighted(outcome.selected), timeline)
            )
            return Trial(
                stimuli=stimuli,
                design=self._design,
                highlights_per_stimulus=self._highlights,
                soa_ms=self._soa_ms,
                flash_ms=self._flash_ms,
                seed=self._seed,
            )
        raise GenerationError(
            f"no valid trial after {self._max_restarts} restarts",
            diagnostics={"failures": failures},
        )


# ---------------------------------------------------------------------------
# Functional API
# ---------------------------------------------------------------------------


def generate_sequence(grid: SymbolGrid, spec: SequenceSpec, seed: int | None = None) -> list[Stimulus]:
    return SequenceBuilder(spec, grid).with_seed(seed).build()


def assemble_trial(
    grid: SymbolGrid,
    seed: int | None = None,
    design: Sequence[SequenceSpec] | None = None,
) -> Trial:
    builder = TrialBuilder(grid).with_seed(seed)
    if design is not None:
        builder.with_design(design)
    return builder.build()


def label_stimuli(trial: Trial, attended: int, grid: SymbolGrid | None = None) -> np.ndarray:
    """+1 for stimuli lighting ``attended``, -1 otherwise."""
    grid = grid or SymbolGrid.speller()
    if not 0 <= attended < grid.n_cells:
        raise ValueError(f"symbol id {attended} is not a grid cell")
    if not grid.is_selectable(attended):
        raise ValueError(f"symbol id {attended} is a visual blank and can never be attended")
    return np.array([1 if attended in s.highlighted else -1 for s in trial.stimuli], dtype=int)
