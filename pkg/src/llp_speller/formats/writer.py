"""
Result Writer
=============
Writes run outputs into one directory: JSON reports, per-character CSV
rows, the decision log, feature exports that can be replayed, and raw
recordings with their marker tables.

Example::

    from llp_speller.formats import ResultWriter

    with ResultWriter("llp-output/run-1") as out:
        out.write_session(result)
        out.write_decisions(result)
    out.written        # paths of every file produced
"""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
from pydantic import BaseModel

from ..models.mixing import MixingMatrix
from ..models.sequence import SymbolGrid
from ..models.session import SessionResult
from ..models.signal import ContinuousRecording, Marker, feature_names
from ..simulation.session import CharacterRecord
from .reader import FEATURE_KEY_COLUMNS, MARKER_COLUMNS, TIME_COLUMN

logger = logging.getLogger(__name__)

DECISION_COLUMNS = ("trial_index", "online_symbol", "posthoc_symbol", "true_symbol")
OUTCOME_COLUMNS = (
    "seed", "repetition", "index", "true_symbol", "online_symbol", "posthoc_symbol",
    "guessed", "auc", "reconstruction_rmse",
)


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _json_default(obj: Any) -> Any:
    if isinstance(obj, BaseModel):
        return obj.model_dump(mode="json")
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


class ResultWriter:
    """Context manager collecting output files under ``out_dir``."""

    def __init__(self, out_dir: str | Path) -> None:
        self.out_dir = Path(out_dir)
        self.written: list[Path] = []

    def __enter__(self) -> "ResultWriter":
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self

    def __exit__(self, *_: Any) -> None:
        logger.info("wrote %d file(s) to %s", len(self.written), self.out_dir)

    # ------------------------------------------------------------------
    # Generic
    # ------------------------------------------------------------------

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def write_json(self, name: str, payload: Any) -> Path:
        p = self.path(name)
        with p.open("w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, default=_json_default)
            fh.write("\n")
        self.written.append(p)
        return p

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        p = self.path(name)
        with p.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for row in rows:
                w.writerow([_cell(v) for v in row])
        self.written.append(p)
        return p

    # ------------------------------------------------------------------
    # Sessions
    # ------------------------------------------------------------------

    def write_session(self, result: SessionResult, name: str = "session.json") -> Path:
        return self.write_json(name, result.model_dump(mode="json"))

    def write_outcomes(self, results: Sequence[SessionResult], name: str = "characters.csv") -> Path:
        rows = (
            [r.seed, o.repetition, o.index, o.true_symbol, o.online_symbol, o.posthoc_symbol,
             int(o.guessed), o.auc, o.reconstruction_rmse]
            for r in results
            for o in r.outcomes
        )
        return self.write_csv(name, OUTCOME_COLUMNS, rows)

    def write_decisions(self, result: SessionResult, name: str = "decisions.csv") -> Path:
        """Decision log, one row per spelled character in session order."""
        rows = (
            [k, o.online_symbol, o.posthoc_symbol, o.true_symbol]
            for k, o in enumerate(result.outcomes)
        )
        return self.write_csv(name, DECISION_COLUMNS, rows)

    def write_features(
        self,
        records: Sequence[CharacterRecord],
        channel_names: Sequence[str] | None = None,
        n_intervals: int | None = None,
        name: str = "features.csv",
    ) -> Path:
        """Every epoch of every trial, keyed by running trial id and stimulus position."""
        if not records:
            raise ValueError("no characters to export")
        d = int(np.asarray(records[0].features[0]).shape[1])
        if channel_names is not None and n_intervals is not None:
            names = feature_names(n_intervals, tuple(channel_names))
        else:
            names = [f"f{i}" for i in range(d)]

        def rows() -> Iterable[list[Any]]:
            trial_id = 0
            for record in records:
                for trial, X, y in zip(record.trials, record.features, record.labels):
                    for k, (stim, x, label) in enumerate(zip(trial.stimuli, X, y)):
                        yield [trial_id, k, stim.group, int(label), *(float(v) for v in x)]
                    trial_id += 1

        return self.write_csv(name, [*FEATURE_KEY_COLUMNS, *names], rows())

    def write_trials(
        self,
        records: Sequence[CharacterRecord],
        *,
        seed: int,
        mixing: MixingMatrix,
        grid: SymbolGrid,
        forgetting: float = 1.0,
        snr_scale: float | None = None,
        name: str = "trials.json",
    ) -> Path:
        payload = {
            "seed": seed,
            "forgetting": forgetting,
            "snr_scale": snr_scale,
            "grid": grid.model_dump(mode="json"),
            "mixing": mixing.to_json_dict(),
            "characters": [
                {
                    "repetition": r.repetition,
                    "index": r.index,
                    "true_symbol": r.true_symbol,
                    "trials": [t.to_json_dict() for t in r.trials],
                }
                for r in records
            ],
        }
        return self.write_json(name, payload)

    # ------------------------------------------------------------------
    # Recordings
    # ------------------------------------------------------------------

    def write_markers(self, markers: Sequence[Marker], name: str = "markers.csv") -> Path:
        rows = (
            [m.sample_index, m.symbol, m.group, "NA" if m.label is None else f"{m.label:+d}"]
            for m in markers
        )
        return self.write_csv(name, MARKER_COLUMNS, rows)

    def write_recording(self, rec: ContinuousRecording, stem: str = "recording") -> tuple[Path, Path]:
        step = 1000.0 / rec.rate
        data = self.write_csv(
            f"{stem}.csv",
            (TIME_COLUMN, *rec.channel_names),
            ([k * step, *row] for k, row in enumerate(rec.samples.T.tolist())),
        )
        markers = self.write_markers(rec.markers, name=f"{stem}_markers.csv")
        return data, markers
