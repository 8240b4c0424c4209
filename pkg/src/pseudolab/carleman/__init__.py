"""Measured sides of the Carleman estimates and the identities behind them."""

from pseudolab.carleman.appendix import (
    ClaimReport,
    ClaimScan,
    DecompositionReport,
    EnergyIdentityReport,
    IdentityRefinement,
    appendix_identity_check,
    claim_b1_pointwise_check,
    claim_normalized,
    claim_threshold_scan,
    energy_identity_check,
    identity_refinement,
)
from pseudolab.carleman.inequalities import (
    CarlemanSides,
    eval_elliptic_carleman,
    eval_global_carleman,
    eval_h1_carleman,
    eval_ode_carleman,
    global_sides,
    time_difference,
)
from pseudolab.carleman.suite import (
    STABILITY_FACTOR,
    SuiteResult,
    elliptic_suite,
    global_suite,
    h1_suite,
    ode_suite,
    random_profile,
    random_space_time,
    run_carleman_suites,
    horizon_scaled_s,
)

__all__ = [
    "STABILITY_FACTOR",
    "CarlemanSides",
    "ClaimReport",
    "ClaimScan",
    "DecompositionReport",
    "EnergyIdentityReport",
    "IdentityRefinement",
    "SuiteResult",
    "appendix_identity_check",
    "claim_b1_pointwise_check",
    "claim_normalized",
    "claim_threshold_scan",
    "elliptic_suite",
    "energy_identity_check",
    "eval_elliptic_carleman",
    "eval_global_carleman",
    "eval_h1_carleman",
    "eval_ode_carleman",
    "global_sides",
    "global_suite",
    "h1_suite",
    "identity_refinement",
    "ode_suite",
    "random_profile",
    "random_space_time",
    "run_carleman_suites",
    "horizon_scaled_s",
]
