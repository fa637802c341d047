"""Versioned JSON schemas for the command-line reports.

Every report embeds ``schema_version``; the schemas below describe the
stable shape of each command's JSON output and can be used with any
JSON-Schema validator.
"""

SCHEMA_VERSION = "1.0"

_CI = {
    "type": "object",
    "required": ["lower", "upper", "level", "clipped_lower", "clipped_upper", "clipped"],
    "properties": {
        "lower": {"type": "number"},
        "upper": {"type": "number"},
        "level": {"type": "number"},
        "clipped_lower": {"type": "number"},
        "clipped_upper": {"type": "number"},
        "clipped": {"type": "boolean"},
    },
}

_METHOD_RESULT = {
    "type": "object",
    "required": ["method", "rho", "warnings"],
    "properties": {
        "method": {"type": "string"},
        "c": {"type": ["number", "string", "null"]},
        "rho": {"type": "number"},
        "a": {"type": ["array", "null"], "items": {"type": "number"}},
        "b": {"type": ["array", "null"], "items": {"type": "number"}},
        "std_errors": {
            "type": ["object", "null"],
            "properties": {
                "rho": {"type": ["number", "null"]},
                "a": {"type": ["array", "null"]},
                "b": {"type": ["array", "null"]},
            },
        },
        "rho_ci": {"anyOf": [_CI, {"type": "null"}]},
        "loss": {"type": ["number", "null"]},
        "converged": {"type": ["boolean", "null"]},
        "warnings": {"type": "array", "items": {"type": "string"}},
        "n": {"type": "integer"},
    },
}

_GRID = {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}

ESTIMATE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema_version", "command", "n", "table", "results"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "command": {"const": "estimate"},
        "input": {"type": "string"},
        "n": {"type": "integer"},
        "alpha": {"type": "number"},
        "table": _GRID,
        "results": {"type": "array", "items": _METHOD_RESULT},
    },
}

RESIDUALS_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": [
        "schema_version", "command", "n", "method",
        "empirical_frequencies", "model_probabilities",
        "pearson_residuals", "floored_cells", "flagged_cells",
    ],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "command": {"const": "residuals"},
        "n": {"type": "integer"},
        "method": {"type": "string"},
        "flag_threshold": {"type": "number"},
        "estimate": _METHOD_RESULT,
        "empirical_frequencies": _GRID,
        "model_probabilities": _GRID,
        "pearson_residuals": _GRID,
        "floored_cells": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "integer"}},
        },
        "flagged_cells": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["x", "y", "pearson_residual"],
                "properties": {
                    "x": {"type": "integer"},
                    "y": {"type": "integer"},
                    "pearson_residual": {"type": "number"},
                },
            },
        },
    },
}

MATRIX_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema_version", "command", "items", "results"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "command": {"const": "matrix"},
        "items": {"type": "array", "items": {"type": "string"}},
        "n": {"type": "integer"},
        "results": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["method", "estimates", "std_errors", "min_eigenvalue"],
                "properties": {
                    "method": {"type": "string"},
                    "estimates": _GRID,
                    "std_errors": _GRID,
                    "pair_n": _GRID,
                    "min_eigenvalue": {"type": "number"},
                    "warnings": {"type": "object"},
                    "failures": {"type": "object"},
                },
            },
        },
        "difference_matrix": {"anyOf": [_GRID, {"type": "null"}]},
    },
}

SIMULATE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema_version", "command", "studies"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "command": {"const": "simulate"},
        "seed": {"type": "integer"},
        "studies": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["epsilon", "n", "replications", "rows"],
                "properties": {
                    "epsilon": {"type": "number"},
                    "rho_star": {"type": "number"},
                    "n": {"type": "integer"},
                    "replications": {"type": "integer"},
                    "alpha": {"type": "number"},
                    "seed": {"type": "integer"},
                    "rows": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["method", "mean_estimate", "mean_bias", "std_dev",
                                         "coverage", "mean_ci_length"],
                        },
                    },
                },
            },
        },
    },
}

SCHEMAS = {
    "estimate": ESTIMATE_SCHEMA,
    "residuals": RESIDUALS_SCHEMA,
    "matrix": MATRIX_SCHEMA,
    "simulate": SIMULATE_SCHEMA,
}
