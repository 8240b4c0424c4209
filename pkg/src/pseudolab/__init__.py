"""
pseudolab - Numerical controllability laboratory for pseudo-parabolic equations.

Builds the BZK and BBM solvers, concentrating beams that defeat observability
from fixed regions, penalized HUM null controls with moving regions, and
measured Carleman inequalities.

Examples:
    >>> from pseudolab import ExperimentConfig, run_experiments
    >>> manifest = run_experiments(ExperimentConfig(), only="flow-check", out="results")
    >>> manifest.ok
    True
"""

__version__ = "0.1.0"

from pseudolab.config import ExperimentConfig, get_runtime_settings  # noqa: E402
from pseudolab.exceptions import LabError  # noqa: E402
from pseudolab.experiments import RunManifest, emit_csv, run_experiments  # noqa: E402
from pseudolab.logger import logger  # noqa: E402

__all__ = [
    "ExperimentConfig",
    "LabError",
    "RunManifest",
    "emit_csv",
    "get_runtime_settings",
    "logger",
    "run_experiments",
]
