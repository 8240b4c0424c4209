"""Both sides of the Carleman inequalities, evaluated by quadrature.

Exponential weights are taken up to a common positive factor per evaluation
(``WeightSet`` kernels for the s-type estimates, ``exp(2 tau gamma)`` divided
by its maximum for the tau-type ones), so ratios are exact while nothing
overflows. Local terms integrate over the sections of the given region.
"""

from __future__ import annotations

import logging

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from pseudolab.exceptions import SolverDivergedError
from pseudolab.flow import MovingRegion
from pseudolab.grid import ScalarField, SpaceTimeField, SpatialGrid, TimeGrid, divergence, gradient_values, integrate_values, laplacian_values, poisson_solve
from pseudolab.pde import AdjointResult, BBMCoefficients, Equation, solve_adjoint
from pseudolab.weights import WeightSet

logger = logging.getLogger(__name__)

__all__ = [
    "CarlemanSides",
    "eval_elliptic_carleman",
    "eval_global_carleman",
    "eval_h1_carleman",
    "eval_ode_carleman",
    "global_sides",
    "time_difference",
]


class CarlemanSides(BaseModel):
    """Named terms of one inequality ``lhs <= C * rhs`` for one test function."""

    model_config = ConfigDict(frozen=True)

    name: str
    lhs_terms: dict[str, float]
    rhs_terms: dict[str, float]
    lam: float
    s: float | None = None
    tau: float | None = None

    @model_validator(mode="after")
    def _check_terms(self) -> CarlemanSides:
        for key, value in {**self.lhs_terms, **self.rhs_terms}.items():
            if not np.isfinite(value) or value < 0.0:
                raise ValueError(f"term {key!r} of {self.name} must be finite and nonnegative, got {value}")
        return self

    @property
    def lhs(self) -> float:
        return float(sum(self.lhs_terms.values()))

    @property
    def rhs(self) -> float:
        return float(sum(self.rhs_terms.values()))

    @property
    def ratio(self) -> float:
        """lhs / rhs; NaN for the trivial 0 / 0 and +inf when only the rhs vanishes."""
        rhs = self.rhs
        if rhs > 0.0:
            return self.lhs / rhs
        return float("nan") if self.lhs == 0.0 else float("inf")

    def row(self) -> dict[str, float | str]:
        """One CSV row with a column per term."""
        out: dict[str, float | str] = {"inequality": self.name, "s": np.nan if self.s is None else self.s, "lam": self.lam}
        out["tau"] = np.nan if self.tau is None else self.tau
        out.update({f"lhs_{key}": value for key, value in self.lhs_terms.items()})
        out.update({f"rhs_{key}": value for key, value in self.rhs_terms.items()})
        out.update({"lhs": self.lhs, "rhs": self.rhs, "ratio": self.ratio})
        return out


def _check_grids(grid: SpatialGrid, time: TimeGrid | None, weights: WeightSet, region: MovingRegion) -> None:
    if weights.eta.grid != grid or region.grid != grid:
        raise ValueError("test function, weights and region must share the spatial grid")
    if time is not None and (weights.eta.time != time or region.time != time):
        raise ValueError("test function, weights and region must share the time grid")


def _vector_integral(vectors: np.ndarray, grid: SpatialGrid, time: TimeGrid | None = None, weight: np.ndarray | None = None, mask: np.ndarray | None = None) -> float:
    """Quadrature of ``|v|^2 weight`` for a vector field with trailing component axis."""
    return sum(integrate_values(vectors[..., axis], grid, time, weight=weight, mask=mask) for axis in range(vectors.shape[-1]))


def time_difference(values: np.ndarray, time: TimeGrid) -> np.ndarray:
    """Centered time derivative (one-sided at the ends)."""
    return np.gradient(values, time.dt, axis=0)


def eval_ode_carleman(q: SpaceTimeField, weights: WeightSet, region: MovingRegion) -> CarlemanSides:
    """Carleman estimate for ``q_t`` with a local term on the region (omega2)."""
    grid, time = q.grid, q.time
    _check_grids(grid, time, weights, region)
    s, lam = weights.s, weights.lam
    q_t = time_difference(q.values, time)
    return CarlemanSides(
        name="ode",
        lhs_terms={"xi_q": s * lam**2 * integrate_values(q.values, grid, time, weight=weights.weighted(1))},
        rhs_terms={
            "q_t": integrate_values(q_t, grid, time, weight=weights.kernel("alpha")),
            "local": s**2 * lam**2 * integrate_values(q.values, grid, time, weight=weights.weighted(2), mask=region.masks),
        },
        lam=lam,
        s=s,
    )


def _slice_weight(weights: WeightSet, m: int, lam: float, tau: float) -> tuple[np.ndarray, np.ndarray]:
    """tau gamma at slice ``m`` and ``exp(2 tau gamma)`` divided by its maximum."""
    if not 0 <= m < weights.eta.time.count:
        raise ValueError(f"slice index {m} outside 0..{weights.eta.time.steps}")
    tau_gamma = tau * np.exp(lam * weights.eta.values[m])
    return tau_gamma, np.exp(2.0 * (tau_gamma - tau_gamma.max()))


def eval_elliptic_carleman(z: ScalarField, m: int, weights: WeightSet, tau: float, region: MovingRegion, lam: float | None = None) -> CarlemanSides:
    """Elliptic estimate at time slice ``m`` for ``z`` with zero trace.

    ``lam`` defaults to the lambda of ``weights``.
    """
    grid = z.grid
    _check_grids(grid, None, weights, region)
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    lam = weights.lam if lam is None else lam
    tau_gamma, kernel = _slice_weight(weights, m, lam, tau)
    mask = region.masks[m]
    grad = gradient_values(z.values, grid)
    lap = laplacian_values(z.values, grid)
    return CarlemanSides(
        name="elliptic",
        lhs_terms={
            "zero_order": lam**4 * integrate_values(z.values, grid, weight=tau_gamma**3 * kernel),
            "gradient": lam**2 * _vector_integral(grad, grid, weight=tau_gamma * kernel),
        },
        rhs_terms={
            "laplacian": integrate_values(lap, grid, weight=kernel),
            "local": lam**4 * integrate_values(z.values, grid, weight=tau_gamma**3 * kernel, mask=mask),
        },
        lam=lam,
        tau=tau,
    )


def eval_h1_carleman(
    g: ScalarField,
    G: np.ndarray,
    m: int,
    weights: WeightSet,
    tau: float,
    region: MovingRegion,
    lam: float | None = None,
) -> CarlemanSides:
    """Estimate for ``-Delta z = g + div G`` with zero trace, at time slice ``m``.

    ``G`` has shape ``(*grid.shape, dim)``. z is obtained from the discrete
    Poisson problem with the centered divergence.

    Raises:
        SolverDivergedError: If the elliptic solve returns non-finite values.
    """
    grid = g.grid
    _check_grids(grid, None, weights, region)
    G = np.asarray(G, dtype=float)
    if G.shape != (*grid.shape, grid.dim):
        raise ValueError(f"G has shape {G.shape}, expected {(*grid.shape, grid.dim)}")
    lam = weights.lam if lam is None else lam
    if lam <= 0 or tau <= 0:
        raise ValueError(f"need lambda > 0 and tau > 0, got lambda={lam}, tau={tau}")

    z = poisson_solve(grid, g.with_values(g.values + divergence(G, grid)))
    if not np.all(np.isfinite(z.values)):
        raise SolverDivergedError("Poisson solve for the H^-1 estimate produced non-finite values")
    tau_gamma, kernel = _slice_weight(weights, m, lam, tau)
    mask = region.masks[m]
    return CarlemanSides(
        name="h1",
        lhs_terms={
            "zero_order": lam**2 * integrate_values(z.values, grid, weight=tau_gamma**2 * kernel),
            "gradient": _vector_integral(gradient_values(z.values, grid), grid, weight=kernel),
        },
        rhs_terms={
            "source": integrate_values(g.values, grid, weight=kernel / tau_gamma) / lam**2,
            "flux": _vector_integral(G, grid, weight=tau_gamma * kernel),
            "local": lam**2 * integrate_values(z.values, grid, weight=tau_gamma**2 * kernel, mask=mask),
        },
        lam=lam,
        tau=tau,
    )


def global_sides(adjoint: AdjointResult, weights: WeightSet, region: MovingRegion, equation: Equation) -> CarlemanSides:
    """Terms of the global estimate for an already computed adjoint pair (phi, psi)."""
    grid, time = adjoint.psi.grid, adjoint.psi.time
    _check_grids(grid, time, weights, region)
    s, lam = weights.s, weights.lam
    phi, psi = adjoint.phi.values, adjoint.psi.values
    phi_t = time_difference(phi, time)
    grad_phi = gradient_values(phi, grid)

    star = weights.weighted(1, "alpha_star", star=True)
    lhs = {}
    if equation == "bzk":
        lhs["grad_phi"] = s * lam**2 * _vector_integral(grad_phi, grid, time, weight=weights.weighted(1))
        lhs["phi"] = s**3 * lam**4 * integrate_values(phi, grid, time, weight=weights.weighted(3))
    elif equation == "bbm":
        lhs["grad_phi"] = _vector_integral(grad_phi, grid, time, weight=weights.kernel("alpha"))
        lhs["phi"] = s**2 * lam**2 * integrate_values(phi, grid, time, weight=weights.weighted(2))
    else:
        raise ValueError(f"unknown equation {equation!r}")
    lhs["psi"] = s * lam**2 * integrate_values(psi, grid, time, weight=weights.weighted(1))
    lhs["grad_phi_t"] = s * lam**2 * _vector_integral(gradient_values(phi_t, grid), grid, time, weight=star)
    lhs["phi_t"] = s * lam**2 * integrate_values(phi_t, grid, time, weight=star)

    if equation == "bzk":
        local = s**5 * lam**6 * integrate_values(psi, grid, time, weight=weights.weighted(5, "mixed"), mask=region.masks)
    else:
        local = s**6 * lam**2 * integrate_values(psi, grid, time, weight=weights.weighted(6, "mixed"), mask=region.masks)
    return CarlemanSides(name=f"global_{equation}", lhs_terms=lhs, rhs_terms={"local": local}, lam=lam, s=s)


def eval_global_carleman(
    psi_T: ScalarField,
    weights: WeightSet,
    region: MovingRegion,
    equation: Equation,
    coefficients: BBMCoefficients | None = None,
) -> CarlemanSides:
    """Solve the adjoint system from ``psi_T`` and evaluate the global estimate on it.

    ``region`` is the outermost moving set (omega).
    """
    adjoint = solve_adjoint(equation, psi_T, weights.eta.time, coefficients)
    sides = global_sides(adjoint, weights, region, equation)
    logger.debug(f"{sides.name} at s={weights.s:g}: lhs {sides.lhs:.3e}, rhs {sides.rhs:.3e}")
    return sides

