"""Forward and adjoint solvers for the controlled BZK and BBM systems."""

from __future__ import annotations

import logging
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from pseudolab.grid import ScalarField, SpaceTimeField, SpatialGrid, TimeGrid, helmholtz_matrix
from pseudolab.pde.coefficients import BBMCoefficients
from pseudolab.pde.stepper import PseudoParabolicStepper, bbm_stepper, bzk_stepper

logger = logging.getLogger(__name__)

Equation = Literal["bzk", "bbm"]


class EvolutionResult(BaseModel):
    """State (y, z) of a forward solve."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    y: SpaceTimeField
    z: SpaceTimeField
    residuals: list[float] = Field(default_factory=list, description="Relative residual of each linear step")


class AdjointResult(BaseModel):
    """Adjoint pair (phi, psi) and the adjoint as paired with sources."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    phi: SpaceTimeField
    psi: SpaceTimeField
    observed: SpaceTimeField | None = Field(default=None, description="Adjoint paired with sources; None when not produced by a stepper sweep")


def get_stepper(equation: Equation, grid: SpatialGrid, time: TimeGrid, coefficients: BBMCoefficients | None = None) -> PseudoParabolicStepper:
    if equation == "bzk":
        return bzk_stepper(grid, time)
    if equation == "bbm":
        if coefficients is None:
            raise ValueError("the BBM solver needs advection coefficients")
        return bbm_stepper(grid, time, coefficients)
    raise ValueError(f"unknown equation {equation!r}")


def control_source(v: SpaceTimeField, chi: SpaceTimeField | None) -> np.ndarray:
    """``v * chi`` flattened to ``(M + 1, size)``."""
    values = v.values if chi is None else v.values * chi.values
    return values.reshape(v.time.count, -1)


def _evolve(stepper: PseudoParabolicStepper, z0: ScalarField, source: np.ndarray | None, record_residuals: bool) -> EvolutionResult:
    if z0.grid != stepper.grid:
        raise ValueError("initial datum and solver use different grids")
    z, residuals = stepper.forward(z0.flat, source, record_residuals)
    y = stepper.K(z.T).T
    grid, time = stepper.grid, stepper.time
    logger.debug(f"{stepper.equation} forward: {time.steps} steps, |z(T)|={np.linalg.norm(z[-1]) * np.sqrt(grid.cell_volume):.3e}")
    return EvolutionResult(
        y=SpaceTimeField(grid=grid, time=time, values=y),
        z=SpaceTimeField(grid=grid, time=time, values=z),
        residuals=residuals,
    )


def _adjoint(stepper: PseudoParabolicStepper, psi_T: ScalarField) -> AdjointResult:
    if psi_T.grid != stepper.grid:
        raise ValueError("terminal datum and solver use different grids")
    psi, mu = stepper.backward(psi_T.flat)
    grid, time = stepper.grid, stepper.time
    return AdjointResult(
        phi=SpaceTimeField(grid=grid, time=time, values=stepper.phi_all(psi)),
        psi=SpaceTimeField(grid=grid, time=time, values=psi),
        observed=SpaceTimeField(grid=grid, time=time, values=stepper.observed(mu)),
    )


def solve_bzk_forward(z0: ScalarField, v: SpaceTimeField, chi: SpaceTimeField | None = None, *, record_residuals: bool = False) -> EvolutionResult:
    """Crank-Nicolson for ``z_t = (K - I) z + v chi``, then ``y = K z``."""
    return _evolve(bzk_stepper(v.grid, v.time), z0, control_source(v, chi), record_residuals)


def solve_bbm_forward(
    z0: ScalarField,
    v: SpaceTimeField,
    chi: SpaceTimeField | None,
    coefficients: BBMCoefficients,
    *,
    record_residuals: bool = False,
) -> EvolutionResult:
    """Crank-Nicolson for ``z_t = -div(A K z) + v chi``, then ``y = K z``."""
    return _evolve(bbm_stepper(v.grid, v.time, coefficients), z0, control_source(v, chi), record_residuals)


def solve_bzk_adjoint(psi_T: ScalarField, time: TimeGrid) -> AdjointResult:
    """Backward solve of ``-psi_t + psi = phi``, ``phi = K psi``, from ``psi(T) = psi_T``."""
    return _adjoint(bzk_stepper(psi_T.grid, time), psi_T)


def solve_bbm_adjoint(psi_T: ScalarField, time: TimeGrid, coefficients: BBMCoefficients) -> AdjointResult:
    """Backward solve of ``-psi_t = phi``, ``(I - Delta_h) phi = A . grad psi``."""
    return _adjoint(bbm_stepper(psi_T.grid, time, coefficients), psi_T)


def solve_forward(
    equation: Equation,
    z0: ScalarField,
    v: SpaceTimeField,
    chi: SpaceTimeField | None = None,
    coefficients: BBMCoefficients | None = None,
) -> EvolutionResult:
    return _evolve(get_stepper(equation, v.grid, v.time, coefficients), z0, control_source(v, chi), False)


def solve_adjoint(equation: Equation, psi_T: ScalarField, time: TimeGrid, coefficients: BBMCoefficients | None = None) -> AdjointResult:
    return _adjoint(get_stepper(equation, psi_T.grid, time, coefficients), psi_T)


def initial_state_from_y0(y0: ScalarField) -> ScalarField:
    """z0 = (I - Delta_h) y0, the datum of the decomposed system for a state y0."""
    return y0.with_values(helmholtz_matrix(y0.grid) @ y0.flat)
