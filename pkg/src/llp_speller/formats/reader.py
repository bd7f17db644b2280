"""
Input Readers
=============
Readers for the interchange files: JSON documents (mixing matrix, grid,
classifier snapshot, synthetic model, recorded trials) and CSV tables
(continuous recordings, stimulus markers, feature exports).

Every malformed input raises :class:`~llp_speller.errors.FormatError`
naming the file and, for CSV, the 1-based line.

Example::

    from llp_speller.formats import CsvTableReader, read_markers_csv

    markers = read_markers_csv("markers.csv")

    with CsvTableReader("features.csv", required=("trial", "stimulus")) as table:
        for line, row in table:
            ...
"""

from __future__ import annotations

import csv
import json
import math
from collections.abc import Iterator
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence, TextIO

import numpy as np
from pydantic import ValidationError

from ..errors import FormatError
from ..models.mixing import MixingMatrix
from ..models.sequence import SymbolGrid, Trial
from ..models.session import ClassifierSnapshot
from ..models.signal import ContinuousRecording, Marker
from ..simulation.model import SyntheticModel
from ..simulation.session import CharacterRecord
from .schemas import (
    GRID_SCHEMA,
    MIXING_SCHEMA,
    MODEL_SCHEMA,
    SNAPSHOT_SCHEMA,
    TRIALS_FILE_SCHEMA,
    validate_document,
)

MARKER_COLUMNS = ("sample_index", "symbol", "group", "label")
TIME_COLUMN = "time_ms"
FEATURE_KEY_COLUMNS = ("trial", "stimulus", "group", "label")
_MISSING = {"", "NA", "na", "NaN", "nan"}


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def read_json(path: str | Path) -> Any:
    p = Path(path)
    try:
        with p.open(encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise FormatError("file not found", path=p) from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc.msg}", path=p, line=exc.lineno) from exc


def _parse(model: Any, doc: Any, path: Path) -> Any:
    try:
        return model.model_validate(doc)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(x) for x in first["loc"]) or "<root>"
        raise FormatError(f"{where}: {first['msg']}", path=path) from exc


def load_mixing(path: str | Path) -> MixingMatrix:
    p = Path(path)
    doc = read_json(p)
    validate_document(doc, MIXING_SCHEMA, p)
    return _parse(MixingMatrix, doc, p)  # type: ignore[no-any-return]


def load_grid(path: str | Path) -> SymbolGrid:
    p = Path(path)
    doc = read_json(p)
    validate_document(doc, GRID_SCHEMA, p)
    return _parse(SymbolGrid, doc, p)  # type: ignore[no-any-return]


def load_snapshot(path: str | Path) -> ClassifierSnapshot:
    p = Path(path)
    doc = read_json(p)
    validate_document(doc, SNAPSHOT_SCHEMA, p)
    return _parse(ClassifierSnapshot, doc, p)  # type: ignore[no-any-return]


def load_model(path: str | Path) -> SyntheticModel:
    p = Path(path)
    doc = read_json(p)
    validate_document(doc, MODEL_SCHEMA, p)
    try:
        return SyntheticModel.from_json_dict(doc)
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise FormatError(f"invalid synthetic model: {exc}", path=p) from exc


@dataclass(frozen=True)
class RecordedSession:
    """Contents of a ``trials.json`` export."""
    seed: int
    forgetting: float
    snr_scale: float
    grid: SymbolGrid
    mixing: MixingMatrix
    characters: list[tuple[int, int, int, list[Trial]]]

    @property
    def n_trials(self) -> int:
        return sum(len(trials) for *_, trials in self.characters)


def load_trials(path: str | Path) -> RecordedSession:
    p = Path(path)
    doc = read_json(p)
    validate_document(doc, TRIALS_FILE_SCHEMA, p)
    grid = _parse(SymbolGrid, doc["grid"], p) if "grid" in doc else SymbolGrid.speller()
    mixing = _parse(MixingMatrix, doc["mixing"], p)
    characters = []
    for ch in doc["characters"]:
        trials = [_parse(Trial, t, p) for t in ch["trials"]]
        characters.append((int(ch["repetition"]), int(ch["index"]), int(ch["true_symbol"]), trials))
    snr = doc.get("snr_scale")
    return RecordedSession(
        seed=int(doc["seed"]),
        forgetting=float(doc.get("forgetting", 1.0)),
        snr_scale=float("nan") if snr is None else float(snr),
        grid=grid,
        mixing=mixing,
        characters=characters,
    )


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


class CsvTableReader:
    """
    Context-managed CSV reader yielding ``(line_number, row_dict)``.

    The header must contain every column in ``required``.
    """

    def __init__(self, source: str | Path, required: Sequence[str] = ()) -> None:
        self._path = Path(source)
        self._required = tuple(required)
        self._fh: TextIO | None = None
        self.header: list[str] = []

    def __enter__(self) -> "CsvTableReader":
        try:
            self._fh = self._path.open(newline="", encoding="utf-8")
        except FileNotFoundError:
            raise FormatError("file not found", path=self._path) from None
        reader = csv.reader(self._fh)
        try:
            self.header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise FormatError("empty file", path=self._path, line=1) from None
        missing = [c for c in self._required if c not in self.header]
        if missing:
            raise FormatError(f"missing column(s) {', '.join(missing)}", path=self._path, line=1)
        self._reader = reader
        return self

    def __exit__(self, *_: Any) -> None:
        if self._fh is not None:
            self._fh.close()

    def __iter__(self) -> Iterator[tuple[int, dict[str, str]]]:
        for row in self._reader:
            line = self._reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(self.header):
                raise self.error(f"expected {len(self.header)} fields, got {len(row)}", line)
            yield line, dict(zip(self.header, (cell.strip() for cell in row)))

    def error(self, message: str, line: int) -> FormatError:
        return FormatError(message, path=self._path, line=line)


def _int(table: CsvTableReader, value: str, column: str, line: int, optional: bool = False) -> int | None:
    if optional and value in _MISSING:
        return None
    try:
        return int(value)
    except ValueError:
        raise table.error(f"column {column!r}: {value!r} is not an integer", line) from None


def _label(table: CsvTableReader, value: str, line: int) -> int | None:
    if value in _MISSING:
        return None
    if value in {"1", "+1"}:
        return 1
    if value == "-1":
        return -1
    raise table.error(f"label must be +1, -1 or NA, got {value!r}", line)


def read_markers_csv(path: str | Path) -> list[Marker]:
    """``sample_index,symbol,group,label`` rows; label is +1, -1 or NA."""
    markers: list[Marker] = []
    with CsvTableReader(path, MARKER_COLUMNS) as table:
        for line, row in table:
            index = _int(table, row["sample_index"], "sample_index", line)
            assert index is not None
            if markers and index <= markers[-1].sample_index:
                raise table.error("sample indices must be strictly increasing", line)
            markers.append(
                Marker(
                    sample_index=index,
                    symbol=_int(table, row["symbol"], "symbol", line, optional=True),
                    group=_int(table, row["group"], "group", line, optional=True),
                    label=_label(table, row["label"], line),
                )
            )
    return markers


def _floats(table: CsvTableReader, row: dict[str, str], columns: Sequence[str], line: int) -> list[float]:
    values = []
    for col in columns:
        try:
            v = float(row[col])
        except ValueError:
            raise table.error(f"column {col!r}: {row[col]!r} is not a number", line) from None
        if not math.isfinite(v):
            raise table.error(f"column {col!r} is not finite", line)
        values.append(v)
    return values


def read_recording_csv(
    path: str | Path, rate: float, markers: Sequence[Marker] | str | Path | None = None
) -> ContinuousRecording:
    """
    One column per channel (header = channel names), one row per sample.

    A leading ``time_ms`` column is accepted and dropped; sample times are
    implied by ``rate``.
    """
    if isinstance(markers, (str, Path)):
        markers = read_markers_csv(markers)
    rows: list[list[float]] = []
    with CsvTableReader(path) as table:
        channels = [h for h in table.header if h != TIME_COLUMN]
        if not channels:
            raise FormatError("no channel columns", path=path, line=1)
        for line, row in table:
            rows.append(_floats(table, row, channels, line))
    if not rows:
        raise FormatError("recording has no samples", path=path)
    try:
        return ContinuousRecording(np.asarray(rows).T, rate, tuple(channels), tuple(markers or ()))
    except ValueError as exc:
        raise FormatError(str(exc), path=path) from exc


@dataclass(frozen=True)
class FeatureTable:
    trial: np.ndarray
    stimulus: np.ndarray
    group: np.ndarray
    label: np.ndarray
    features: np.ndarray
    names: tuple[str, ...]

    def rows_for_trial(self, t: int) -> np.ndarray:
        idx = np.flatnonzero(self.trial == t)
        return idx[np.argsort(self.stimulus[idx], kind="stable")]


def read_features_csv(path: str | Path) -> FeatureTable:
    """``trial,stimulus,group,label`` followed by one column per feature."""
    keys: list[tuple[int, int, int, int]] = []
    values: list[list[float]] = []
    with CsvTableReader(path, FEATURE_KEY_COLUMNS) as table:
        names = [h for h in table.header if h not in FEATURE_KEY_COLUMNS]
        if not names:
            raise FormatError("no feature columns", path=path, line=1)
        for line, row in table:
            label = _label(table, row["label"], line)
            keys.append(
                (
                    _int(table, row["trial"], "trial", line) or 0,
                    _int(table, row["stimulus"], "stimulus", line) or 0,
                    _int(table, row["group"], "group", line) or 0,
                    0 if label is None else label,
                )
            )
            values.append(_floats(table, row, names, line))
    k = np.asarray(keys, dtype=int).reshape(-1, 4)
    return FeatureTable(
        trial=k[:, 0],
        stimulus=k[:, 1],
        group=k[:, 2],
        label=k[:, 3],
        features=np.asarray(values, dtype=float).reshape(len(values), len(names)),
        names=tuple(names),
    )


def records_from_export(session: RecordedSession, table: FeatureTable) -> list[CharacterRecord]:
    """Re-attach exported features to the recorded trials (trial ids count up from 0)."""
    records: list[CharacterRecord] = []
    trial_id = 0
    for rep, index, symbol, trials in session.characters:
        record = CharacterRecord(repetition=rep, index=index, true_symbol=symbol)
        for trial in trials:
            rows = table.rows_for_trial(trial_id)
            if rows.shape[0] != len(trial):
                raise FormatError(
                    f"trial {trial_id} has {rows.shape[0]} feature rows for {len(trial)} stimuli"
                )
            if not np.array_equal(table.group[rows], trial.groups):
                raise FormatError(f"trial {trial_id}: group tags disagree with the trial file")
            record.trials.append(trial)
            record.features.append(table.features[rows])
            record.labels.append(table.label[rows])
            trial_id += 1
        records.append(record)
    return records
