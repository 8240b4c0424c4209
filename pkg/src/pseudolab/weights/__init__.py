"""Weight function eta, time profile r and the Carleman weight family."""

from pseudolab.weights.certification import PROPERTIES, WeightPropertyReport, certify, check_weight_properties
from pseudolab.weights.eta import EtaField, EtaProfile, anchor_path, build_eta_sweep_1d, psi0
from pseudolab.weights.profile import r_on_time_grid, r_profile
from pseudolab.weights.weightset import SUP_INFLATION, WeightSet, assemble_weights

__all__ = [
    "PROPERTIES",
    "SUP_INFLATION",
    "EtaField",
    "EtaProfile",
    "WeightPropertyReport",
    "WeightSet",
    "anchor_path",
    "assemble_weights",
    "build_eta_sweep_1d",
    "certify",
    "check_weight_properties",
    "psi0",
    "r_on_time_grid",
    "r_profile",
]
