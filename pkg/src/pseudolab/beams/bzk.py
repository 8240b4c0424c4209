"""Fourier-localized beams of the BZK adjoint system.

The terminal datum has Fourier transform

    eps^{N/4} theta(sqrt(eps) (xi - xi_bar / eps)) exp(-i x0 . xi),

so after the substitution ``zeta = sqrt(eps) (xi - xi_bar / eps)`` the free-space
solution is an integral over the unit ball,

    psi(x, t) = (2 pi)^-N eps^{-N/4} int theta(zeta) exp(-a(xi) (T - t)) exp(i (x - x0) . xi) dzeta,

with ``a(xi) = |xi|^2 / (1 + |xi|^2)``; phi carries the extra factor
``1 / (1 + |xi|^2)``. The integral is evaluated by Gauss-Legendre quadrature
(polar in 2D) whose order is doubled until the values settle.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.special import gamma, roots_legendre

from pseudolab.beams.report import BeamEntry, BeamReport
from pseudolab.config import get_runtime_settings
from pseudolab.exceptions import QuadratureError
from pseudolab.flow import RegionShape
from pseudolab.grid import BoundaryTrace, SpaceTimeField, SpatialGrid, TimeGrid, boundary_lift, boundary_points, integrate, integrate_values
from pseudolab.pde import AdjointResult, bzk_stepper

logger = logging.getLogger(__name__)

START_ORDER = 32
MAX_ORDER = 1024
QUADRATURE_RTOL = 1e-8
# Complex entries of one phase block
CHUNK_ENTRIES = 2**21
# Radius factor of the concentration accounting
CONCENTRATION_C = 4.0


class BZKBeamParams(BaseModel):
    """Parameters of one concentrating BZK beam."""

    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(gt=0, lt=1, description="Concentration parameter")
    x0: tuple[float, ...] = Field(description="Concentration point")
    xi_bar: tuple[float, ...] = Field(description="Unit frequency direction")
    k: int = Field(default=1, ge=1, description="Decay order, k > N/4")
    delta: float = Field(default=0.2, gt=0, description="Separation radius around x0")

    @model_validator(mode="after")
    def _check(self) -> BZKBeamParams:
        if len(self.x0) not in (1, 2):
            raise ValueError(f"beams live in dimension 1 or 2, got {len(self.x0)}")
        if len(self.xi_bar) != len(self.x0):
            raise ValueError("xi_bar and x0 must have the same dimension")
        if abs(float(np.linalg.norm(self.xi_bar)) - 1.0) > 1e-12:
            raise ValueError(f"xi_bar must be a unit vector, got {self.xi_bar}")
        if not self.k > len(self.x0) / 4:
            raise ValueError(f"decay order k={self.k} must exceed N/4")
        return self

    @property
    def dim(self) -> int:
        return len(self.x0)

    @property
    def expected_slope(self) -> float:
        """Decay exponent k - N/4 of the localized norms."""
        return self.k - self.dim / 4

    @property
    def prefactor(self) -> float:
        return float((2.0 * np.pi) ** -self.dim * self.epsilon ** (-self.dim / 4))

    def frequency(self, zeta: np.ndarray) -> np.ndarray:
        """xi = zeta / sqrt(eps) + xi_bar / eps."""
        return zeta / np.sqrt(self.epsilon) + np.asarray(self.xi_bar) / self.epsilon

    def with_epsilon(self, epsilon: float) -> BZKBeamParams:
        return self.model_copy(update={"epsilon": epsilon})


class BZKBeamFields(BaseModel):
    """Free-space beam sampled on the grid, with the Dirichlet trace of phi."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    params: BZKBeamParams
    psi: SpaceTimeField
    phi: SpaceTimeField
    boundary: BoundaryTrace = Field(description="phi on the boundary nodes, one face value per time node")
    order: int


def theta_normalization(dim: int) -> float:
    """c with ||c (1 - |zeta|^2)^4||_{L2(B1)} = 1."""
    return float(np.sqrt(gamma(9.0 + dim / 2) / (np.pi ** (dim / 2) * gamma(9.0))))


def theta_profile(zeta: np.ndarray) -> np.ndarray:
    """Smooth bump c (1 - |zeta|^2)^4 supported in the unit ball."""
    zeta = np.atleast_2d(zeta)
    r2 = np.sum(zeta**2, axis=-1)
    return theta_normalization(zeta.shape[-1]) * np.clip(1.0 - r2, 0.0, None) ** 4


def beam_quadrature(dim: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes ``(Q, dim)`` and weights ``(Q,)`` for integrals over the unit ball.

    1D: Gauss-Legendre on [-1, 1]. 2D: Gauss-Legendre in the radius (weight rho)
    times ``2 * order`` equispaced angles.
    """
    u, w = roots_legendre(order)
    if dim == 1:
        return u[:, None], w
    if dim == 2:
        rho = 0.5 * (u + 1.0)
        radial = 0.5 * w * rho
        n_angles = 2 * order
        angles = 2.0 * np.pi * np.arange(n_angles) / n_angles
        nodes = np.stack([np.outer(rho, np.cos(angles)), np.outer(rho, np.sin(angles))], axis=-1).reshape(-1, 2)
        weights = np.outer(radial, np.full(n_angles, 2.0 * np.pi / n_angles)).reshape(-1)
        return nodes, weights
    raise ValueError(f"unsupported dimension {dim}")


def _evaluate_order(params: BZKBeamParams, points: np.ndarray, times: np.ndarray, horizon: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    zeta, weights = beam_quadrature(params.dim, order)
    xi = params.frequency(zeta)
    xi2 = np.sum(xi**2, axis=-1)
    rate = xi2 / (1.0 + xi2)
    amplitude = weights * theta_profile(zeta)
    psi_weights = np.exp(-np.outer(horizon - times, rate)) * amplitude
    phi_weights = psi_weights / (1.0 + xi2)

    shift = points - np.asarray(params.x0)
    psi = np.empty((len(times), len(points)), dtype=complex)
    phi = np.empty_like(psi)
    chunk = max(1, CHUNK_ENTRIES // len(xi))
    for start in range(0, len(points), chunk):
        stop = start + chunk
        phase = np.exp(1j * (shift[start:stop] @ xi.T))
        psi[:, start:stop] = psi_weights @ phase.T
        phi[:, start:stop] = phi_weights @ phase.T
    return params.prefactor * psi, params.prefactor * phi


def converged_order(params: BZKBeamParams, points: np.ndarray, times: np.ndarray, horizon: float, start: int = START_ORDER) -> int:
    """First order whose values differ from those at half the order by < 1e-8 relative.

    Raises:
        QuadratureError: If the order exceeds the cap before settling.
    """
    order = start
    previous, _ = _evaluate_order(params, points, times, horizon, order)
    while order < MAX_ORDER:
        order *= 2
        current, _ = _evaluate_order(params, points, times, horizon, order)
        scale = max(float(np.max(np.abs(current))), np.finfo(float).tiny)
        change = float(np.max(np.abs(current - previous))) / scale
        if change < QUADRATURE_RTOL:
            logger.debug(f"beam quadrature eps={params.epsilon:g}: order {order}, change {change:.2e}")
            return order
        previous = current
    raise QuadratureError(f"beam quadrature for eps={params.epsilon:g} did not settle below order {MAX_ORDER}")


def bzk_beam_evaluate(
    params: BZKBeamParams,
    x: np.ndarray,
    t: np.ndarray | float,
    horizon: float,
    order: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Free-space pair ``(psi, phi)`` at points ``x`` and times ``t``.

    ``x`` is a single point ``(dim,)`` or a stack ``(P, dim)``; ``t`` a scalar or
    a vector. Results have shape ``(len(t), P)`` with scalar axes dropped.
    """
    points = np.atleast_2d(np.asarray(x, dtype=float))
    if points.shape[-1] != params.dim:
        points = points.reshape(-1, params.dim)
    times = np.atleast_1d(np.asarray(t, dtype=float))
    if order is None:
        order = converged_order(params, points, times, horizon)
    psi, phi = _evaluate_order(params, points, times, horizon, order)
    if np.ndim(t) == 0:
        psi, phi = psi[0], phi[0]
    if np.ndim(x) == 1 and len(np.asarray(x)) == params.dim:
        psi, phi = psi[..., 0], phi[..., 0]
    return psi, phi


def _check_inside(params: BZKBeamParams, grid: SpatialGrid) -> None:
    if params.dim != grid.dim:
        raise ValueError(f"beam dimension {params.dim} does not match grid dimension {grid.dim}")
    x0 = np.asarray(params.x0)
    if np.any(x0 - params.delta < grid.lower) or np.any(x0 + params.delta > grid.upper):
        raise ValueError(f"the ball of radius {params.delta} around {params.x0} is not inside the domain")


def bzk_beam_fields(params: BZKBeamParams, grid: SpatialGrid, time: TimeGrid) -> BZKBeamFields:
    """Sample the free-space beam on interior nodes and phi on the boundary nodes."""
    _check_inside(params, grid)
    faces = boundary_points(grid)
    face_points = [face for pair in faces for face in pair]
    points = np.concatenate([grid.points(), *face_points])
    order = converged_order(params, points, np.array([0.0, time.horizon]), time.horizon)
    psi, phi = _evaluate_order(params, points, time.nodes, time.horizon, order)

    shape = (time.count, *grid.shape)
    traces = []
    offset = grid.size
    for low, high in faces:
        low_values = phi[:, offset : offset + len(low)]
        offset += len(low)
        high_values = phi[:, offset : offset + len(high)]
        offset += len(high)
        traces.append((low_values, high_values))
    return BZKBeamFields(
        params=params,
        psi=SpaceTimeField(grid=grid, time=time, values=psi[:, : grid.size].reshape(shape)),
        phi=SpaceTimeField(grid=grid, time=time, values=phi[:, : grid.size].reshape(shape)),
        boundary=BoundaryTrace.from_values(grid, traces),
        order=order,
    )


def bzk_boundary_correction(
    params: BZKBeamParams,
    grid: SpatialGrid,
    time: TimeGrid,
    fields: BZKBeamFields | None = None,
) -> AdjointResult:
    """Adjoint pair with ``phi* = -q`` on the boundary and ``psi*(T) = 0``.

    The boundary data are lifted into the source: ``phi* = K psi* + l`` with
    ``l = K lift(-q)``, so ``psi*`` solves ``-psi*_t + psi* = K psi* + l``, which
    is the forward BZK equation in reversed time.
    """
    if fields is None:
        fields = bzk_beam_fields(params, grid, time)
    stepper = bzk_stepper(grid, time)
    lift = boundary_lift(fields.boundary.scaled(-1.0)).reshape(time.count, grid.size)
    ell = stepper.K(lift.T).T
    reversed_psi, _ = stepper.forward(np.zeros(grid.size, dtype=complex), ell[::-1])
    psi_star = reversed_psi[::-1]
    phi_star = stepper.K(psi_star.T).T + ell
    shape = (time.count, *grid.shape)
    return AdjointResult(
        phi=SpaceTimeField(grid=grid, time=time, values=phi_star.reshape(shape)),
        psi=SpaceTimeField(grid=grid, time=time, values=psi_star.reshape(shape)),
    )


def parseval_norm(params: BZKBeamParams, horizon: float, order: int = MAX_ORDER // 4) -> float:
    """||psi(., 0)||^2 over R^N from the Fourier side."""
    zeta, weights = beam_quadrature(params.dim, order)
    xi2 = np.sum(params.frequency(zeta) ** 2, axis=-1)
    density = weights * theta_profile(zeta) ** 2 * np.exp(-2.0 * horizon * xi2 / (1.0 + xi2))
    return float((2.0 * np.pi) ** -params.dim * np.sum(density))


def concentration_radius(epsilon: float) -> float:
    return CONCENTRATION_C * float(np.sqrt(epsilon * np.log(1.0 / epsilon)))


def concentration(params: BZKBeamParams, psi0: np.ndarray, grid: SpatialGrid) -> float:
    """Fraction of the initial-slice mass within the concentration radius of x0."""
    total = integrate_values(psi0, grid)
    if total == 0.0:
        return float("nan")
    distance = np.linalg.norm(grid.points() - np.asarray(params.x0), axis=-1).reshape(grid.shape)
    inside = integrate_values(psi0, grid, mask=distance <= concentration_radius(params.epsilon))
    return inside / total


def _sweep_entry(params: BZKBeamParams, mask: np.ndarray, grid: SpatialGrid, time: TimeGrid) -> BeamEntry:
    fields = bzk_beam_fields(params, grid, time)
    correction = bzk_boundary_correction(params, grid, time, fields)
    psi = fields.psi.values + correction.psi.values
    norm_initial = integrate_values(psi[0], grid)
    logger.debug(f"bzk beam eps={params.epsilon:g}: order {fields.order}, |q|max={fields.boundary.max_abs():.3e}")
    return BeamEntry(
        param=params.epsilon,
        norm_initial=norm_initial,
        norm_localized=integrate_values(psi, grid, time, mask=mask),
        norm_correction=integrate(correction.psi),
        diagnostics={
            "parseval_norm": parseval_norm(params, time.horizon, fields.order),
            "concentration": concentration(params, psi[0], grid),
            "quadrature_order": float(fields.order),
            "boundary_max": fields.boundary.max_abs(),
        },
    )


def bzk_beam_sweep(
    epsilons: list[float],
    region: RegionShape,
    grid: SpatialGrid,
    time: TimeGrid,
    base: BZKBeamParams,
) -> BeamReport:
    """Beam norms for every epsilon, the free-space beam plus its boundary correction.

    Raises:
        ValueError: If the delta-ball around x0 meets the region.
    """
    x0 = np.asarray(base.x0)[None, :]
    if bool(region.dilate(base.delta).contains(x0)[0]):
        raise ValueError(f"x0={base.x0} lies within {base.delta} of the observation region")
    mask = region.contains(grid.points()).reshape(grid.shape)
    workers = max(1, min(get_runtime_settings().threads, len(epsilons)))
    logger.info(f"bzk beam sweep over {len(epsilons)} values of eps ({workers} workers)")
    with ThreadPoolExecutor(max_workers=workers) as executor:
        entries = list(executor.map(lambda eps: _sweep_entry(base.with_epsilon(eps), mask, grid, time), epsilons))
    return BeamReport.from_entries("bzk", entries)
