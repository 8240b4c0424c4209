"""WKB beams of the BBM adjoint system.

The ansatz is ``psi_h = exp(i alpha / h) (f0 + h f1 + h^2 f2)`` with the complex
phase ``alpha(x) = x . xi0 + i |x - x0|^2 / 2`` and a cutoff f0 around x0. The
correctors cancel the h^-1 and h^0 terms of the residual:

    f1 = i f0 (I . grad alpha) / q,
    f2 = [I . grad f0 + i J . grad alpha + 2 i grad f1 . grad alpha + i f1 lap alpha] / q,

with ``I = int_t^T A``, ``J = int_t^T f1 A`` and ``q = grad alpha . grad alpha``.
The ``hermitian`` variant replaces q by ``|xi0|^2 + |x - x0|^2``; it leaves an
uncancelled h^-1 remainder away from x0 and is kept for comparison.

The discrete residual of the sampled ansatz is removed by a forward
correction so that the sum is an exact discrete adjoint solution.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.integrate import cumulative_trapezoid

from pseudolab.beams.report import BeamEntry, BeamReport
from pseudolab.config import get_runtime_settings
from pseudolab.flow import RegionShape
from pseudolab.grid import ScalarField, SpaceTimeField, SpatialGrid, TimeGrid, gradient_values, integrate_values
from pseudolab.pde import BBMCoefficients, bbm_stepper

logger = logging.getLogger(__name__)

PhaseNorm = Literal["hermitian", "bilinear"]


class WKBBeamParams(BaseModel):
    """Parameters of one WKB beam."""

    model_config = ConfigDict(frozen=True)

    h: float = Field(gt=0, description="Semiclassical parameter")
    xi0: tuple[float, ...] = Field(description="Nonzero frequency vector")
    x0: tuple[float, ...] = Field(description="Centre of the cutoff")
    delta: float = Field(default=0.2, gt=0, description="Cutoff radius; f0 vanishes beyond it")
    plateau: float = Field(default=0.5, ge=0.5, lt=1.0, description="f0 = 1 on the ball of radius plateau * delta")
    phase_norm: PhaseNorm = Field(
        default="bilinear",
        description="q = |xi0|^2 + |x - x0|^2 (hermitian) or grad alpha . grad alpha (bilinear)",
    )

    @model_validator(mode="after")
    def _check(self) -> WKBBeamParams:
        if len(self.x0) not in (1, 2) or len(self.xi0) != len(self.x0):
            raise ValueError("xi0 and x0 must share dimension 1 or 2")
        norm = float(np.linalg.norm(self.xi0))
        if norm == 0.0:
            raise ValueError("xi0 must be nonzero")
        if self.phase_norm == "bilinear" and not self.delta < norm:
            raise ValueError("the bilinear phase norm needs delta < |xi0| to stay away from zero")
        return self

    @property
    def dim(self) -> int:
        return len(self.x0)

    def with_h(self, h: float) -> WKBBeamParams:
        return self.model_copy(update={"h": h})


class WKBFields(BaseModel):
    """Sampled ansatz, its correctors and the discrete residual."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    params: WKBBeamParams
    f0: ScalarField
    f1: SpaceTimeField
    f2: SpaceTimeField
    psi: SpaceTimeField = Field(description="psi_h on every slice")
    residual: np.ndarray = Field(description="R^m for m = 0..M-1, shape (M, *grid.shape)")
    defects: np.ndarray = Field(description="One-step adjoint defects d^m, flat, shape (M, size)")

    @property
    def residual_norm(self) -> float:
        """sum_m dt ||R^m||^2."""
        grid, time = self.psi.grid, self.psi.time
        return float(sum(time.dt * integrate_values(r, grid) for r in self.residual))


def _smoothstep(u: np.ndarray) -> np.ndarray:
    return u**3 * (10.0 - 15.0 * u + 6.0 * u**2)


def _smoothstep_slope(u: np.ndarray) -> np.ndarray:
    return 30.0 * u**2 * (1.0 - u) ** 2


def cutoff(params: WKBBeamParams, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """f0 and its gradient; f0 = 1 within plateau * delta of x0 and 0 beyond delta."""
    shift = points - np.asarray(params.x0)
    r = np.linalg.norm(shift, axis=-1)
    ramp_width = (1.0 - params.plateau) * params.delta
    u = np.clip((params.delta - r) / ramp_width, 0.0, 1.0)
    f0 = _smoothstep(u)
    ramp = (u > 0.0) & (u < 1.0)
    safe_r = np.where(r > 0.0, r, 1.0)
    slope = np.where(ramp, -_smoothstep_slope(u) / ramp_width, 0.0)
    grad = (slope / safe_r)[:, None] * shift
    return f0, grad


def phase(params: WKBBeamParams, points: np.ndarray) -> np.ndarray:
    """alpha(x) = x . xi0 + i |x - x0|^2 / 2."""
    shift = points - np.asarray(params.x0)
    return points @ np.asarray(params.xi0) + 0.5j * np.sum(shift**2, axis=-1)


def _tail_integral(values: np.ndarray, dt: float) -> np.ndarray:
    """int_{t_m}^T of a time-indexed array, by the trapezoid rule."""
    return cumulative_trapezoid(values[::-1], dx=dt, axis=0, initial=0.0)[::-1]


def bbm_wkb_fields(params: WKBBeamParams, coefficients: BBMCoefficients, grid: SpatialGrid, time: TimeGrid) -> WKBFields:
    """Sample the WKB ansatz on the grid and measure its discrete residual."""
    if params.dim != grid.dim:
        raise ValueError(f"beam dimension {params.dim} does not match grid dimension {grid.dim}")
    x0 = np.asarray(params.x0)
    if np.any(x0 - params.delta <= grid.lower) or np.any(x0 + params.delta >= grid.upper):
        raise ValueError(f"the ball of radius {params.delta} around {params.x0} is not inside the domain")

    points = grid.points()
    shift = points - x0
    count, size, dim = time.count, grid.size, grid.dim
    A = np.asarray(coefficients.sample(grid, time)).reshape(count, size, dim)

    grad_alpha = np.asarray(params.xi0)[None, :] + 1j * shift
    lap_alpha = 1j * dim
    if params.phase_norm == "hermitian":
        q = np.sum(np.asarray(params.xi0) ** 2) + np.sum(shift**2, axis=-1)
    else:
        q = np.sum(grad_alpha**2, axis=-1)

    f0, grad_f0 = cutoff(params, points)
    support = f0 > 0.0
    I = _tail_integral(A, time.dt)
    f1 = 1j * f0 * np.sum(I * grad_alpha, axis=-1) / q
    J = _tail_integral(f1[..., None] * A, time.dt)
    grad_f1 = gradient_values(f1.reshape(count, *grid.shape), grid).reshape(count, size, dim)
    grad_f1 = np.where(support[None, :, None], grad_f1, 0.0)
    f2 = (
        np.sum(I * grad_f0, axis=-1)
        + 1j * np.sum(J * grad_alpha, axis=-1)
        + 2j * np.sum(grad_f1 * grad_alpha, axis=-1)
        + 1j * f1 * lap_alpha
    ) / q
    f2 = np.where(support, f2, 0.0)

    h = params.h
    psi = np.exp(1j * phase(params, points) / h) * (f0 + h * f1 + h**2 * f2)

    stepper = bbm_stepper(grid, time, coefficients)
    defects = stepper.adjoint_defects(psi)
    residual = stepper.helmholtz(defects.T).T / time.dt

    shape = (count, *grid.shape)
    return WKBFields(
        params=params,
        f0=ScalarField(grid=grid, values=f0.reshape(grid.shape)),
        f1=SpaceTimeField(grid=grid, time=time, values=f1.reshape(shape)),
        f2=SpaceTimeField(grid=grid, time=time, values=f2.reshape(shape)),
        psi=SpaceTimeField(grid=grid, time=time, values=psi.reshape(shape)),
        residual=residual.reshape((time.steps, *grid.shape)),
        defects=defects,
    )


def corrected_beam(fields: WKBFields, coefficients: BBMCoefficients) -> tuple[SpaceTimeField, SpaceTimeField]:
    """``(psi, c)`` with ``psi = psi_h + c`` an exact discrete adjoint solution and ``c(0) = 0``."""
    grid, time = fields.psi.grid, fields.psi.time
    correction = bbm_stepper(grid, time, coefficients).correction(fields.defects)
    shape = (time.count, *grid.shape)
    c = SpaceTimeField(grid=grid, time=time, values=correction.reshape(shape))
    return fields.psi.with_values(fields.psi.values + c.values), c


def _sweep_entry(params: WKBBeamParams, coefficients: BBMCoefficients, mask: np.ndarray, grid: SpatialGrid, time: TimeGrid) -> BeamEntry:
    fields = bbm_wkb_fields(params, coefficients, grid, time)
    psi, correction = corrected_beam(fields, coefficients)
    region_max = float(np.max(np.abs(fields.psi.values[:, mask]))) if np.any(mask) else 0.0
    residual_norm = fields.residual_norm
    logger.debug(f"bbm beam h={params.h:g}: |R|^2={residual_norm:.3e}")
    return BeamEntry(
        param=params.h,
        norm_initial=integrate_values(psi.values[0], grid),
        norm_localized=integrate_values(psi.values, grid, time, mask=mask),
        norm_correction=integrate_values(correction.values, grid, time),
        residual_norm=residual_norm,
        diagnostics={
            "ansatz_region_max": region_max,
            "ansatz_norm_initial": integrate_values(fields.psi.values[0], grid),
        },
    )


def bbm_beam_sweep(
    hs: list[float],
    region: RegionShape,
    coefficients: BBMCoefficients,
    grid: SpatialGrid,
    time: TimeGrid,
    base: WKBBeamParams,
) -> BeamReport:
    """Corrected WKB beam norms for every h.

    Raises:
        ValueError: If the cutoff ball meets the closure of the region.
    """
    x0 = np.asarray(base.x0)[None, :]
    if bool(region.dilate(base.delta).contains(x0)[0]):
        raise ValueError(f"x0={base.x0} lies within {base.delta} of the observation region")
    mask = region.contains(grid.points()).reshape(grid.shape)
    workers = max(1, min(get_runtime_settings().threads, len(hs)))
    logger.info(f"bbm beam sweep over {len(hs)} values of h ({workers} workers)")
    with ThreadPoolExecutor(max_workers=workers) as executor:
        entries = list(executor.map(lambda h: _sweep_entry(base.with_h(h), coefficients, mask, grid, time), hs))
    return BeamReport.from_entries("bbm", entries)
