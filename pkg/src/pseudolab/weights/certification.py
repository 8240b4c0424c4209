"""Pointwise certification of the weight properties on the grid."""

from __future__ import annotations

import logging

import numpy as np
from pydantic import BaseModel, Field

from pseudolab.exceptions import CertificationError
from pseudolab.flow import MovingRegion
from pseudolab.weights.eta import EtaField

logger = logging.getLogger(__name__)

PROPERTIES = ("gradient_off", "eta_t_off", "early_growth", "late_decay", "boundary_outflow", "level_gap")


class WeightPropertyReport(BaseModel):
    """Signed worst-case margins; a property passes iff its margin is positive."""

    gradient_off: float = Field(description="min |grad eta| off the closure of the omega1 section")
    eta_t_off: float = Field(description="min |eta_t| off the closure of the omega1 section")
    early_growth: float = Field(description="min eta_t for t <= tau off the omega1 section")
    late_decay: float = Field(description="min -eta_t for t >= T - tau off the omega1 section")
    boundary_outflow: float = Field(description="min -d eta / d nu on the boundary")
    level_gap: float = Field(description="min eta - (3/4) max |eta| over the closed domain")
    tau_margin: float
    grid_n: tuple[int, ...] = ()
    steps: int = 0

    def passes(self, name: str) -> bool:
        return bool(getattr(self, name) > 0.0)

    @property
    def passed(self) -> bool:
        return all(self.passes(name) for name in PROPERTIES)

    @property
    def failures(self) -> list[str]:
        return [name for name in PROPERTIES if not self.passes(name)]


def _min_or_inf(values: np.ndarray) -> float:
    return float(np.min(values)) if values.size else float("inf")


def _interior_gradient_norm(padded: np.ndarray, spacing: tuple[float, ...]) -> np.ndarray:
    """|grad| at interior nodes from samples padded by one layer (leading time axis)."""
    dim = len(spacing)
    total = np.zeros((padded.shape[0], *(size - 2 for size in padded.shape[1:])))
    for axis, h in enumerate(spacing):
        hi = [slice(1, -1)] * dim
        lo = [slice(1, -1)] * dim
        hi[axis] = slice(2, None)
        lo[axis] = slice(None, -2)
        derivative = (padded[(slice(None), *hi)] - padded[(slice(None), *lo)]) / (2.0 * h)
        total += derivative**2
    return np.sqrt(total)


def _outward_normal_derivatives(padded: np.ndarray, spacing: tuple[float, ...]) -> list[np.ndarray]:
    """Ghost-layer centered d/d nu on each face from samples padded by two layers.

    Boundary nodes sit at index 1 and -2 along each axis; corners are skipped.
    """
    dim = len(spacing)
    out = []
    for axis, h in enumerate(spacing):
        for side in (-1, 1):
            index = [slice(2, -2)] * dim
            outer = list(index)
            inner = list(index)
            if side < 0:
                outer[axis], inner[axis] = 0, 2
            else:
                outer[axis], inner[axis] = -1, -3
            out.append((padded[(slice(None), *outer)] - padded[(slice(None), *inner)]) / (2.0 * h))
    return out


def check_weight_properties(eta: EtaField, omega1: MovingRegion, tau_margin: float) -> WeightPropertyReport:
    """Evaluate each property at every grid node in the set where each is asserted."""
    grid, time = eta.grid, eta.time
    if omega1.grid != grid or omega1.time != time:
        raise ValueError("eta and the omega1 region must share grids")

    off_region = ~omega1.closure_masks()
    gradient_norm = _interior_gradient_norm(eta.padded_values(1), grid.spacing)
    eta_t = eta.time_derivative()

    early = time.nodes <= tau_margin + 1e-12
    late = time.nodes >= time.horizon - tau_margin - 1e-12

    gradient_off = _min_or_inf(gradient_norm[off_region])
    eta_t_off = _min_or_inf(np.abs(eta_t)[off_region])
    early_growth = _min_or_inf(eta_t[early][off_region[early]])
    late_decay = _min_or_inf(-eta_t[late][off_region[late]])
    boundary_outflow = min(_min_or_inf(-face) for face in _outward_normal_derivatives(eta.padded_values(2), grid.spacing))
    closed = eta.padded_values(1)
    level_gap = float(np.min(closed) - 0.75 * np.max(np.abs(closed)))

    report = WeightPropertyReport(gradient_off=gradient_off, eta_t_off=eta_t_off, early_growth=early_growth, late_decay=late_decay, boundary_outflow=boundary_outflow, level_gap=level_gap, tau_margin=tau_margin, grid_n=grid.n, steps=time.steps)
    logger.debug(f"weight properties: {report.model_dump(include=set(PROPERTIES))}")
    return report


def certify(report: WeightPropertyReport) -> WeightPropertyReport:
    """Return ``report`` unchanged if every property holds.

    Raises:
        CertificationError: Naming every failing property and its margin.
    """
    if not report.passed:
        detail = ", ".join(f"{name} margin {getattr(report, name):.3e}" for name in report.failures)
        raise CertificationError(f"weight certification failed: {detail}")
    return report
