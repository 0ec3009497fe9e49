"""Modified direct shooting transcriptions for second-order systems."""

import json

from ._core import (
    CSV_HEADER,
    ConfigError,
    ContractViolation,
    EvaluationError,
    accel,
    benchmark_names,
    convergence_study,
    default_params,
    euler_bound,
    rk4_bound,
    rollout,
    romberg,
)
from ._core import run as _run

SCHEMES = ("1st-euler", "2nd-euler", "1st-rk4", "2nd-rk4")


def run(config, mode="compare", ref_multiplier=8):
    """Run a compare or sweep experiment. `config` is a dict or a JSON string."""
    if not isinstance(config, str):
        config = json.dumps(config)
    return _run(config, mode, ref_multiplier)


__all__ = [
    "CSV_HEADER",
    "ConfigError",
    "ContractViolation",
    "EvaluationError",
    "SCHEMES",
    "accel",
    "benchmark_names",
    "convergence_study",
    "default_params",
    "euler_bound",
    "rk4_bound",
    "rollout",
    "romberg",
    "run",
]
