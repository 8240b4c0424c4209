"""Experiment families, the run manifest and CSV emission."""

from pseudolab.experiments.families import FAMILY_RUNNERS
from pseudolab.experiments.runner import MANIFEST_NAME, RunManifest, package_version, run_experiments
from pseudolab.experiments.tables import SIGNIFICANT_DIGITS, emit_csv, format_value, frame_from_rows, text_frame

__all__ = [
    "FAMILY_RUNNERS",
    "MANIFEST_NAME",
    "SIGNIFICANT_DIGITS",
    "RunManifest",
    "emit_csv",
    "format_value",
    "frame_from_rows",
    "package_version",
    "run_experiments",
    "text_frame",
]
