"""Exact and simulated genealogies of branching processes in varying environment."""

import json

from ._core import (
    ConfigError,
    Environment,
    InvariantViolation,
    NumericError,
    conditional_mean,
    moments,
    mrca,
    sample_reduced,
    shape_identity,
    survival_curve,
    validate,
)

__version__ = "0.1.0"


def environment(spec, horizon):
    """Build an environment from the same mapping the CLI config uses under "environment"."""
    return Environment.from_json(json.dumps(spec), horizon)


__all__ = [
    "ConfigError",
    "Environment",
    "InvariantViolation",
    "NumericError",
    "conditional_mean",
    "environment",
    "moments",
    "mrca",
    "sample_reduced",
    "shape_identity",
    "survival_curve",
    "validate",
]
