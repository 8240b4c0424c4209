"""Penalized HUM null controls and the controllability dichotomy."""

from pseudolab.control.dichotomy import DiagnosticCurve, DiagnosticPoint, GrowthBound, dichotomy_diagnostic
from pseudolab.control.hum import ControlSolution, HUMProblem, hum_value_and_gradient, observability_quotient, solve_null_control

__all__ = [
    "ControlSolution",
    "DiagnosticCurve",
    "DiagnosticPoint",
    "GrowthBound",
    "HUMProblem",
    "dichotomy_diagnostic",
    "hum_value_and_gradient",
    "observability_quotient",
    "solve_null_control",
]
