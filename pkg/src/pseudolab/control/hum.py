"""Penalized HUM null controls.

For terminal adjoint data psi_T the functional

    J(psi_T) = 1/2 sum_k w_k ||chi obs^k||^2 + beta/2 ||psi_T||^2 + <psi(0), z0>

is a convex quadratic, ``J(x) = 1/2 <Lambda x, x> + <b, x>``. Here obs is the
adjoint as seen by the trapezoid pairing, so by discrete duality
``Lambda x + b`` is the terminal state of the forward system driven from z0 by
the control ``v = chi^2 obs``, plus ``beta x``. CG solves ``Lambda x = -b``.
"""

from __future__ import annotations

import logging

import numpy as np
import scipy.sparse.linalg as spla
from pydantic import BaseModel, ConfigDict, Field, model_validator

from pseudolab.exceptions import CGStalledError
from pseudolab.flow import MovingRegion
from pseudolab.grid import ScalarField, SpaceTimeField, SpatialGrid, TimeGrid, integrate, integrate_values
from pseudolab.pde import BBMCoefficients, Equation, PseudoParabolicStepper, get_stepper

logger = logging.getLogger(__name__)


class HUMProblem(BaseModel):
    """Null control of one equation from z0 with controls supported in a (moving) region."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    equation: Equation
    z0: ScalarField
    region: MovingRegion
    beta: float = Field(gt=0, description="Penalty on ||psi_T||^2")
    tol: float = Field(default=1e-8, gt=0, description="Relative gradient norm at which CG stops")
    max_iter: int = Field(default=500, ge=1)
    coefficients: BBMCoefficients | None = None
    strict: bool = Field(default=False, description="Raise CGStalledError when the cap is hit")

    @model_validator(mode="after")
    def _check(self) -> HUMProblem:
        if self.z0.grid != self.region.grid:
            raise ValueError("initial datum and control region use different grids")
        if self.z0.is_complex:
            raise ValueError("HUM works with real initial data")
        if self.equation == "bbm" and self.coefficients is None:
            raise ValueError("the BBM problem needs advection coefficients")
        return self

    @property
    def grid(self) -> SpatialGrid:
        return self.region.grid

    @property
    def time(self) -> TimeGrid:
        return self.region.time

    @property
    def chi(self) -> SpaceTimeField:
        return self.region.chi

    @property
    def stepper(self) -> PseudoParabolicStepper:
        return get_stepper(self.equation, self.grid, self.time, self.coefficients)

    def with_beta(self, beta: float) -> HUMProblem:
        return self.model_copy(update={"beta": beta})

    def with_region(self, region: MovingRegion) -> HUMProblem:
        return self.model_copy(update={"region": region})


class ControlSolution(BaseModel):
    """Optimal adjoint datum, the control it induces and the forward-verified outcome."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    psi_T: ScalarField
    v: SpaceTimeField = Field(description="chi^2 times the observed adjoint")
    z: SpaceTimeField = Field(description="Controlled state of the decomposed system")
    final_norm: float = Field(ge=0, description="||z(T)||")
    final_state_norm: float = Field(ge=0, description="||y(T)|| with y = K z")
    cost: float = Field(ge=0, description="||v||^2 over the control region")
    value: float = Field(description="J at the returned psi_T; J(0) = 0")
    beta: float
    cg_iterations: int
    cg_residuals: list[float] = Field(default_factory=list, description="Relative gradient norm after each iteration")
    cg_values: list[float] = Field(default_factory=list, description="J after each iteration")
    converged: bool


def _chi_squared(problem: HUMProblem) -> np.ndarray:
    return problem.chi.values.reshape(problem.time.count, -1) ** 2


def _observe(stepper: PseudoParabolicStepper, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    psi, mu = stepper.backward(x)
    return psi, stepper.observed(mu)


def _gramian(problem: HUMProblem, stepper: PseudoParabolicStepper, chi2: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Lambda x = z(T) from z(0) = 0 with control chi^2 obs, plus beta x."""
    _, obs = _observe(stepper, x)
    z, _ = stepper.forward(np.zeros(problem.grid.size), chi2 * obs)
    return z[-1] + problem.beta * x


def hum_value_and_gradient(problem: HUMProblem, psi_T: ScalarField) -> tuple[float, ScalarField]:
    """J and its gradient for the discrete L2 pairing.

    The gradient is ``z(T) + beta psi_T`` where z is driven from z0 by
    ``v = chi^2 obs``.
    """
    if psi_T.grid != problem.grid:
        raise ValueError("terminal datum and problem use different grids")
    stepper = problem.stepper
    chi2 = _chi_squared(problem)
    x = psi_T.flat
    psi, obs = _observe(stepper, x)
    vol = problem.grid.cell_volume
    weights = problem.time.trapezoid_weights()
    observed = 0.5 * vol * float(np.dot(weights, np.sum(chi2 * obs**2, axis=1)))
    penalty = 0.5 * problem.beta * vol * float(np.dot(x, x))
    coupling = vol * float(np.dot(psi[0], problem.z0.flat))
    z, _ = stepper.forward(problem.z0.flat, chi2 * obs)
    return observed + penalty + coupling, psi_T.with_values(z[-1] + problem.beta * x)


def _solution(
    problem: HUMProblem,
    stepper: PseudoParabolicStepper,
    b: np.ndarray,
    x: np.ndarray,
    iterations: int,
    residuals: list[float],
    values: list[float],
    converged: bool,
) -> ControlSolution:
    grid, time = problem.grid, problem.time
    chi2 = _chi_squared(problem)
    _, obs = _observe(stepper, x)
    v = chi2 * obs
    z, _ = stepper.forward(problem.z0.flat, v)
    shape = (time.count, *grid.shape)
    control = SpaceTimeField(grid=grid, time=time, values=v.reshape(shape))
    state = SpaceTimeField(grid=grid, time=time, values=z.reshape(shape))
    final = ScalarField(grid=grid, values=z[-1])
    vol = grid.cell_volume
    value = 0.5 * vol * float(np.dot(_gramian(problem, stepper, chi2, x), x)) + vol * float(np.dot(b, x))
    return ControlSolution(
        psi_T=ScalarField(grid=grid, values=x),
        v=control,
        z=state,
        final_norm=float(np.sqrt(integrate(final))),
        final_state_norm=float(np.sqrt(integrate(final.with_values(stepper.K(z[-1]))))),
        cost=integrate_values(control.values, grid, time),
        value=value,
        beta=problem.beta,
        cg_iterations=iterations,
        cg_residuals=residuals,
        cg_values=values,
        converged=converged,
    )


def _free_terminal(problem: HUMProblem, stepper: PseudoParabolicStepper) -> np.ndarray:
    """z(T) without control; the linear term b of J."""
    z, _ = stepper.forward(problem.z0.flat)
    return z[-1]


def solve_null_control(problem: HUMProblem) -> ControlSolution:
    """Minimize J by conjugate gradients from psi_T = 0.

    Raises:
        CGStalledError: If ``problem.strict`` and CG hits its iteration cap.
    """
    stepper = problem.stepper
    grid = problem.grid
    chi2 = _chi_squared(problem)
    vol = grid.cell_volume
    b = _free_terminal(problem, stepper)
    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        return _solution(problem, stepper, b, np.zeros(grid.size), 0, [], [], True)

    operator = spla.LinearOperator((grid.size, grid.size), matvec=lambda x: _gramian(problem, stepper, chi2, np.ravel(x)), dtype=float)
    residuals: list[float] = []
    values: list[float] = []

    def _track(xk: np.ndarray) -> None:
        applied = _gramian(problem, stepper, chi2, xk)
        residuals.append(float(np.linalg.norm(applied + b)) / b_norm)
        values.append(0.5 * vol * float(np.dot(applied, xk)) + vol * float(np.dot(b, xk)))

    x, info = spla.cg(operator, -b, rtol=problem.tol, atol=0.0, maxiter=problem.max_iter, callback=_track)
    converged = info == 0
    iterations = len(residuals)
    if not converged:
        message = f"CG stopped after {iterations} iterations at relative gradient {residuals[-1] if residuals else float('nan'):.3e} (beta={problem.beta:g})"
        if problem.strict:
            raise CGStalledError(message)
        logger.warning(message)
    else:
        logger.debug(f"CG converged in {iterations} iterations (beta={problem.beta:g})")
    return _solution(problem, stepper, b, x, iterations, residuals, values, converged)


def observability_quotient(problem: HUMProblem, psi_T: ScalarField) -> float:
    """||psi(0)||^2 / int int chi^2 |psi|^2 for the adjoint solution from psi_T."""
    stepper = problem.stepper
    psi, _ = stepper.backward(psi_T.flat)
    grid, time = problem.grid, problem.time
    shape = (time.count, *grid.shape)
    observed = integrate_values(psi.reshape(shape), grid, time, weight=problem.chi.values**2)
    initial = integrate_values(psi[0].reshape(grid.shape), grid)
    if observed == 0.0:
        return float("inf") if initial > 0.0 else float("nan")
    return initial / observed
