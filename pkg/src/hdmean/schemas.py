"""JSON schemas of the documents written by the command-line tool."""

_number = {"type": "number"}
_count = {"type": "integer", "minimum": 1}

TEST_REPORT = {
    "type": "object",
    "required": ["n", "d", "statistic", "quantile", "p_value", "reject", "alpha", "B", "seed", "mu0"],
    "additionalProperties": False,
    "properties": {
        "n": _count,
        "d": _count,
        "statistic": {"type": "number", "minimum": 0},
        "quantile": {"type": "number", "minimum": 0},
        "p_value": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "reject": {"type": "boolean"},
        "alpha": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "B": _count,
        "seed": {"type": "integer", "minimum": 0},
        "mu0": {"type": "array", "items": _number},
    },
}

DIAGNOSTICS_REPORT = {
    "type": "object",
    "required": ["n", "d", "l_projection", "trace_sum", "lindeberg", "cov_entries", "epsilon_grid"],
    "additionalProperties": False,
    "properties": {
        "n": _count,
        "d": _count,
        "l_projection": _count,
        "trace_sum": {"type": "number", "minimum": 0},
        "lindeberg": {"type": "object", "additionalProperties": {"type": "number", "minimum": 0}},
        "cov_entries": {
            "type": "object",
            "propertyNames": {"pattern": "^[0-9]+,[0-9]+$"},
            "additionalProperties": _number,
        },
        "epsilon_grid": {"type": "array", "minItems": 1, "items": {"type": "number", "exclusiveMinimum": 0}},
    },
}

_cell = {
    "type": "object",
    "required": ["index", "n", "d_n", "alpha", "metric", "value", "stderr", "wall_time", "status", "error", "extra"],
    "additionalProperties": False,
    "properties": {
        "index": {"type": "integer", "minimum": 0},
        "n": _count,
        "d_n": _count,
        "alpha": {"type": ["number", "null"]},
        "metric": {"enum": ["rejection_rate", "ks", "trace_sum"]},
        "value": {"type": ["number", "null"]},
        "stderr": {"type": ["number", "null"], "minimum": 0},
        "wall_time": {"type": "number", "minimum": 0},
        "status": {"enum": ["ok", "failed"]},
        "error": {"type": ["string", "null"]},
        "extra": {"type": "object"},
    },
}

EXPERIMENT_REPORT = {
    "type": "object",
    "required": ["version", "master_seed", "plan", "failed", "cells"],
    "additionalProperties": False,
    "properties": {
        "version": {"type": "string"},
        "master_seed": {"type": "integer", "minimum": 0},
        "plan": {"type": "object", "required": ["kind"]},
        "failed": {"type": "boolean"},
        "cells": {"type": "array", "items": _cell},
    },
}
