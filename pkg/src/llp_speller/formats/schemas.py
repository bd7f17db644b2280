"""
JSON Schemas
============
Structural schemas for every JSON document llp-speller reads. Documents
are checked against these before pydantic parses them, so errors point
at the offending JSON path.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

from jsonschema import Draft202012Validator
from jsonschema.exceptions import best_match

from ..errors import FormatError

_PAIR = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 2,
    "maxItems": 2,
}

MIXING_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "Mixing matrix",
    "type": "object",
    "required": ["rows"],
    "properties": {
        "rows": {"type": "array", "items": _PAIR, "minItems": 1},
        "label": {"type": ["string", "null"]},
    },
}

GRID_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "Symbol grid",
    "type": "object",
    "required": ["rows", "cols", "symbols"],
    "properties": {
        "rows": {"type": "integer", "minimum": 1},
        "cols": {"type": "integer", "minimum": 1},
        "symbols": {"type": "array", "items": {"type": "string", "minLength": 1}},
        "blank_symbol": {"type": "string"},
        "space_symbol": {"type": "string"},
    },
}

TRIAL_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "Trial",
    "type": "object",
    "required": ["stimuli"],
    "properties": {
        "stimuli": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["highlighted", "group"],
                "properties": {
                    "highlighted": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    "group": {"type": "integer", "minimum": 1},
                    "sequence": {"type": ["integer", "null"], "minimum": 0},
                },
            },
        },
        "design": {"type": "array"},
        "highlights_per_stimulus": {"type": "integer", "minimum": 1},
        "soa_ms": {"type": "number"},
        "flash_ms": {"type": "number"},
        "seed": {"type": ["integer", "null"]},
    },
}

TRIALS_FILE_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "Recorded session trials",
    "type": "object",
    "required": ["seed", "mixing", "characters"],
    "properties": {
        "seed": {"type": "integer", "minimum": 0},
        "forgetting": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "snr_scale": {"type": ["number", "null"]},
        "grid": GRID_SCHEMA,
        "mixing": MIXING_SCHEMA,
        "characters": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["repetition", "index", "true_symbol", "trials"],
                "properties": {
                    "repetition": {"type": "integer", "minimum": 0},
                    "index": {"type": "integer", "minimum": 0},
                    "true_symbol": {"type": "integer", "minimum": 0},
                    "trials": {"type": "array", "items": TRIAL_SCHEMA, "minItems": 1},
                },
            },
        },
    },
}

SNAPSHOT_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "Classifier snapshot",
    "type": "object",
    "required": ["w", "d"],
    "properties": {
        "w": {"type": "array", "items": {"type": "number"}},
        "gamma": {"type": ["number", "null"]},
        "d": {"type": "integer", "minimum": 1},
        "metadata": {"type": "object"},
    },
}

MODEL_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "Synthetic model",
    "type": "object",
    "required": ["mu_plus", "mu_minus", "covariance"],
    "properties": {
        "mu_plus": {"type": "array", "items": {"type": "number"}},
        "mu_minus": {"type": "array", "items": {"type": "number"}},
        "covariance": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
        "snr_scale": {"type": "number", "minimum": 0},
    },
}


def validate_document(doc: Any, schema: dict[str, Any], path: str | Path | None = None) -> None:
    """Raise :class:`FormatError` describing the first schema violation."""
    validator = Draft202012Validator(schema)
    first = best_match(validator.iter_errors(doc))
    if first is not None:
        where = "/".join(str(p) for p in first.absolute_path) or "<root>"
        raise FormatError(
            f"{schema.get('title', 'document')} invalid at {where}: {first.message}", path=path
        )
