from .reader import (
    CsvTableReader,
    FeatureTable,
    RecordedSession,
    load_grid,
    load_mixing,
    load_model,
    load_snapshot,
    load_trials,
    read_features_csv,
    read_json,
    read_markers_csv,
    read_recording_csv,
    records_from_export,
)
from .schemas import validate_document
from .writer import ResultWriter

__all__ = [
    "CsvTableReader",
    "FeatureTable",
    "RecordedSession",
    "ResultWriter",
    "load_grid",
    "load_mixing",
    "load_model",
    "load_snapshot",
    "load_trials",
    "read_features_csv",
    "read_json",
    "read_markers_csv",
    "read_recording_csv",
    "records_from_export",
    "validate_document",
]
