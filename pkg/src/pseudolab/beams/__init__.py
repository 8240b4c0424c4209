"""Concentrating adjoint solutions that defeat fixed-region observability."""

from pseudolab.beams.bbm import WKBBeamParams, WKBFields, bbm_beam_sweep, bbm_wkb_fields, corrected_beam, cutoff, phase
from pseudolab.beams.bzk import (
    BZKBeamFields,
    BZKBeamParams,
    beam_quadrature,
    bzk_beam_evaluate,
    bzk_beam_fields,
    bzk_beam_sweep,
    bzk_boundary_correction,
    concentration,
    concentration_radius,
    converged_order,
    parseval_norm,
    theta_normalization,
    theta_profile,
)
from pseudolab.beams.report import BeamEntry, BeamReport, fit_slope

__all__ = [
    "BZKBeamFields",
    "BZKBeamParams",
    "BeamEntry",
    "BeamReport",
    "WKBBeamParams",
    "WKBFields",
    "bbm_beam_sweep",
    "bbm_wkb_fields",
    "beam_quadrature",
    "bzk_beam_evaluate",
    "bzk_beam_fields",
    "bzk_beam_sweep",
    "bzk_boundary_correction",
    "concentration",
    "concentration_radius",
    "converged_order",
    "corrected_beam",
    "cutoff",
    "fit_slope",
    "parseval_norm",
    "phase",
    "theta_normalization",
    "theta_profile",
]
