"""
Conformance Validator
======================
Checks mixing matrices and stimulus trials against the structural rules the
decoder relies on.

Returns structured ValidationResult objects with one issue per violated rule.

Example::

    from llp_speller.validator import MixingValidator, TrialValidator

    result = TrialValidator().validate(trial)
    if not result.passed:
        for issue in result.issues:
            print(f"[{issue.severity}] {issue.rule_id}: {issue.message}")
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Sequence

import numpy as np

from ..mixing.mean_map import RANK_THRESHOLD, gram_determinant, noise_amplification
from ..models.mixing import MixingMatrix
from ..models.sequence import SequenceSpec, Stimulus, SymbolGrid, Trial


# ---------------------------------------------------------------------------
# Result types
# ---------------------------------------------------------------------------


class Severity(str, Enum):
    ERROR = "ERROR"
    WARNING = "WARNING"
    INFO = "INFO"


@dataclass
class ValidationIssue:
    rule_id: str
    severity: Severity
    message: str
    field: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "rule": self.rule_id,
            "severity": self.severity.value,
            "message": self.message,
            "field": self.field,
        }


@dataclass
class ValidationResult:
    """Result of a validation run."""
    passed: bool
    subject: str
    issues: list[ValidationIssue] = field(default_factory=list)
    rule_count: int = 0

    @property
    def errors(self) -> list[ValidationIssue]:
        return [i for i in self.issues if i.severity == Severity.ERROR]

    @property
    def warnings(self) -> list[ValidationIssue]:
        return [i for i in self.issues if i.severity == Severity.WARNING]

    def rule_ids(self) -> set[str]:
        return {i.rule_id for i in self.issues}

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "subject": self.subject,
            "rule_count": self.rule_count,
            "issues": [i.to_dict() for i in self.issues],
        }

    def __str__(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"[{status}] {self.subject} "
            f"– {len(self.errors)} error(s), {len(self.warnings)} warning(s)"
        )


# ---------------------------------------------------------------------------
# Mixing Validator
# ---------------------------------------------------------------------------


class MixingValidator:
    """
    Validates a mixing matrix.

    Rules implemented:
    - MX-001  At least two groups
    - MX-002  Entries in [0, 1]
    - MX-003  Rows sum to 1 within 1e-12
    - MX-004  Rank 2 (det(ΠᵀΠ) >= 1e-10)
    - MX-005  Noise amplification above NAF_NOTICE (info)
    """

    ROW_SUM_TOLERANCE = 1e-12
    NAF_NOTICE = 100.0

    def validate(self, m: MixingMatrix) -> ValidationResult:
        issues: list[ValidationIssue] = []
        rules_run = 0

        def add(rule_id: str, sev: Severity, msg: str, fld: str | None = None) -> None:
            issues.append(ValidationIssue(rule_id, sev, msg, fld))

        pi = m.as_array()

        # MX-001 Group count
        rules_run += 1
        if m.n_groups < 2:
            add("MX-001", Severity.ERROR, f"need at least 2 groups, got {m.n_groups}", "rows")

        # MX-002 Range
        rules_run += 1
        bad = np.argwhere((pi < 0.0) | (pi > 1.0))
        for g, c in bad:
            add(
                "MX-002",
                Severity.ERROR,
                f"entry ({g + 1}, {'plus' if c == 0 else 'minus'}) = {pi[g, c]} outside [0, 1]",
                f"rows[{g}]",
            )

        # MX-003 Row sums
        rules_run += 1
        for g, total in enumerate(pi.sum(axis=1)):
            if abs(total - 1.0) > self.ROW_SUM_TOLERANCE:
                add("MX-003", Severity.ERROR, f"row {g + 1} sums to {total!r}, not 1", f"rows[{g}]")

        # MX-004 Rank
        rules_run += 1
        det = gram_determinant(m)
        if abs(det) < RANK_THRESHOLD:
            add(
                "MX-004",
                Severity.ERROR,
                f"matrix has rank < 2 (det(ΠᵀΠ) = {det:.3g}); rows are linearly dependent",
                "rows",
            )

        # MX-005 Conditioning notice
        rules_run += 1
        if abs(det) >= RANK_THRESHOLD:
            naf = noise_amplification(m)
            if naf > self.NAF_NOTICE:
                add(
                    "MX-005",
                    Severity.INFO,
                    f"noise amplification factor {naf:.1f} is high; expect slow convergence",
                )

        passed = not any(i.severity == Severity.ERROR for i in issues)
        return ValidationResult(
            passed=passed,
            subject=f"mixing G={m.n_groups}" + (f" ({m.label})" if m.label else ""),
            issues=issues,
            rule_count=rules_run,
        )

    def validate_batch(self, matrices: list[MixingMatrix]) -> list[ValidationResult]:
        return [self.validate(m) for m in matrices]


# ---------------------------------------------------------------------------
# Trial Validator
# ---------------------------------------------------------------------------


class TrialValidator:
    """
    Validates trials (and standalone sequences) against a symbol grid.

    Rules implemented:
    - TR-001  Stimulus count equals the summed design lengths
    - TR-002  Every stimulus lights exactly ``highlights_per_stimulus`` cells
    - TR-003  Every id is a valid grid cell
    - TR-004  Stimulus count per group tag matches the design
    - TR-005  Every selectable symbol appears ``appearances`` times per sequence
    - TR-006  No selectable symbol in two consecutive stimuli (double flash)
    - TR-007  Selectable symbols have pairwise distinct membership patterns
    - TR-008  Group tag agrees with the tagged sequence's spec
    - TR-009  Each sequence holds exactly ``length`` stimuli
    """

    def __init__(self, grid: SymbolGrid | None = None) -> None:
        self.grid = grid or SymbolGrid.speller()

    def validate(self, trial: Trial) -> ValidationResult:
        issues: list[ValidationIssue] = []
        rules_run = 0

        def add(rule_id: str, sev: Severity, msg: str, fld: str | None = None) -> None:
            issues.append(ValidationIssue(rule_id, sev, msg, fld))

        design = trial.design
        stimuli = trial.stimuli

        # TR-001 Count
        rules_run += 1
        expected_total = sum(s.length for s in design)
        if len(stimuli) != expected_total:
            add("TR-001", Severity.ERROR, f"{len(stimuli)} stimuli, expected {expected_total}", "stimuli")

        # TR-002 / TR-003 Size and ids
        rules_run += 2
        for issue in self._stimulus_issues(stimuli, trial.highlights_per_stimulus):
            issues.append(issue)

        # TR-004 Group counts
        rules_run += 1
        expected_groups = Counter[int]()
        for spec in design:
            expected_groups[spec.group] += spec.length
        actual_groups = Counter(s.group for s in stimuli)
        for g in sorted(set(expected_groups) | set(actual_groups)):
            if expected_groups[g] != actual_groups[g]:
                add(
                    "TR-004",
                    Severity.ERROR,
                    f"group {g}: {actual_groups[g]} stimuli, expected {expected_groups[g]}",
                    "group",
                )

        # TR-008 / TR-009 Sequence tags
        rules_run += 2
        tagged = all(s.sequence is not None for s in stimuli)
        if not tagged:
            add(
                "TR-009",
                Severity.WARNING,
                "stimuli carry no sequence index; appearance counts checked per group only",
                "sequence",
            )
        else:
            for k, spec in enumerate(design):
                n = sum(1 for s in stimuli if s.sequence == k)
                if n != spec.length:
                    add("TR-009", Severity.ERROR, f"sequence {k}: {n} stimuli, expected {spec.length}", "sequence")
            for pos, s in enumerate(stimuli):
                if s.sequence is None or s.sequence >= len(design):
                    add("TR-008", Severity.ERROR, f"stimulus {pos}: unknown sequence {s.sequence}", "sequence")
                elif design[s.sequence].group != s.group:
                    add(
                        "TR-008",
                        Severity.ERROR,
                        f"stimulus {pos}: group {s.group} but sequence {s.sequence} "
                        f"belongs to group {design[s.sequence].group}",
                        "group",
                    )

        # TR-005 Appearance counts
        rules_run += 1
        if tagged:
            for k, spec in enumerate(design):
                block = [s for s in stimuli if s.sequence == k]
                issues.extend(self._appearance_issues(block, spec.appearances, f"sequence {k}"))
        else:
            per_group = Counter[int]()
            for spec in design:
                per_group[spec.group] += spec.appearances
            for g, appearances in sorted(per_group.items()):
                block = [s for s in stimuli if s.group == g]
                issues.extend(self._appearance_issues(block, appearances, f"group {g}"))

        # TR-006 Double flash
        rules_run += 1
        issues.extend(self._double_flash_issues(stimuli))

        # TR-007 Decodability
        rules_run += 1
        issues.extend(self._decodability_issues(stimuli))

        passed = not any(i.severity == Severity.ERROR for i in issues)
        return ValidationResult(
            passed=passed,
            subject=f"trial ({len(stimuli)} stimuli)",
            issues=issues,
            rule_count=rules_run,
        )

    def validate_sequence(
        self,
        stimuli: Sequence[Stimulus],
        spec: SequenceSpec,
        highlights: int = 12,
    ) -> ValidationResult:
        """Per-sequence subset of the trial rules (TR-001/2/3/5/6)."""
        issues: list[ValidationIssue] = []
        if len(stimuli) != spec.length:
            issues.append(ValidationIssue(
                "TR-001", Severity.ERROR, f"{len(stimuli)} stimuli, expected {spec.length}", "stimuli"
            ))
        issues.extend(self._stimulus_issues(stimuli, highlights))
        issues.extend(self._appearance_issues(stimuli, spec.appearances, "sequence"))
        issues.extend(self._double_flash_issues(stimuli))
        passed = not any(i.severity == Severity.ERROR for i in issues)
        return ValidationResult(
            passed=passed,
            subject=f"sequence ({spec.length} with {spec.appearances})",
            issues=issues,
            rule_count=5,
        )

    def validate_batch(self, trials: list[Trial]) -> list[ValidationResult]:
        return [self.validate(t) for t in trials]

    # ------------------------------------------------------------------
    # Rule helpers
    # ------------------------------------------------------------------

    def _stimulus_issues(self, stimuli: Sequence[Stimulus], highlights: int) -> list[ValidationIssue]:
        issues = []
        for pos, s in enumerate(stimuli):
            if len(s.highlighted) != highlights:
                issues.append(ValidationIssue(
                    "TR-002",
                    Severity.ERROR,
                    f"stimulus {pos} lights {len(s.highlighted)} cells, expected {highlights}",
                    "highlighted",
                ))
            invalid = [i for i in s.highlighted if not 0 <= i < self.grid.n_cells]
            if invalid:
                issues.append(ValidationIssue(
                    "TR-003", Severity.ERROR, f"stimulus {pos} has invalid ids {invalid}", "highlighted"
                ))
        return issues

    def _appearance_issues(
        self, block: Sequence[Stimulus], appearances: int, where: str
    ) -> list[ValidationIssue]:
        counts = Counter(i for s in block for i in s.highlighted)
        wrong = [
            f"{self.grid.label(sym)}={counts[sym]}"
            for sym in self.grid.selectable
            if counts[sym] != appearances
        ]
        if not wrong:
            return []
        shown = ", ".join(wrong[:6]) + (f" (+{len(wrong) - 6})" if len(wrong) > 6 else "")
        return [ValidationIssue(
            "TR-005",
            Severity.ERROR,
            f"{where}: symbols not lit exactly {appearances} times: {shown}",
            "highlighted",
        )]

    def _double_flash_issues(self, stimuli: Sequence[Stimulus]) -> list[ValidationIssue]:
        issues = []
        selectable = set(self.grid.selectable)
        for pos in range(1, len(stimuli)):
            shared = selectable.intersection(stimuli[pos - 1].highlighted, stimuli[pos].highlighted)
            if shared:
                labels = [self.grid.label(i) for i in sorted(shared)]
                issues.append(ValidationIssue(
                    "TR-006",
                    Severity.ERROR,
                    f"double flash between stimuli {pos - 1} and {pos}: {labels}",
                    "highlighted",
                ))
        return issues

    def _decodability_issues(self, stimuli: Sequence[Stimulus]) -> list[ValidationIssue]:
        patterns: dict[tuple[int, ...], int] = {}
        issues = []
        for sym in self.grid.selectable:
            pattern = tuple(k for k, s in enumerate(stimuli) if sym in s.highlighted)
            other = patterns.setdefault(pattern, sym)
            if other != sym:
                issues.append(ValidationIssue(
                    "TR-007",
                    Severity.ERROR,
                    f"symbols {self.grid.label(other)!r} and {self.grid.label(sym)!r} "
                    "share a stimulus pattern and cannot be told apart",
                    "highlighted",
                ))
        return issues


def validate_trial(t: Trial, grid: SymbolGrid | None = None) -> ValidationResult:
    """Shortcut for ``TrialValidator(grid).validate(t)``."""
    return TrialValidator(grid).validate(t)
