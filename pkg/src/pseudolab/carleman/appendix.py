"""Algebraic identities behind the elliptic Carleman estimates.

With ``w = exp(tau gamma) z`` and ``gamma = exp(lambda eta)``,

    exp(tau gamma) Delta z = M1 w - M2 w,
    M1 w = Delta w + tau^2 |grad gamma|^2 w,
    M2 w = 2 tau grad gamma . grad w + tau (Delta gamma) w,

so ``||exp(tau gamma) Delta z||^2 = ||M1 w||^2 + ||M2 w||^2 - 2 (M1 w, M2 w)``.
Derivatives of gamma use the analytic eta on ghost layers; derivatives of w
use zero boundary values. ``exp(tau gamma)`` is divided by its maximum, which
scales every quadratic term by the same factor.
"""

from __future__ import annotations

import logging
from collections.abc import Callable

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from pseudolab.flow import MovingRegion
from pseudolab.grid import ScalarField, SpatialGrid, divergence, gradient_values, laplacian_values
from pseudolab.weights import EtaField, WeightSet

logger = logging.getLogger(__name__)

__all__ = [
    "ClaimReport",
    "ClaimScan",
    "DecompositionReport",
    "EnergyIdentityReport",
    "IdentityRefinement",
    "appendix_identity_check",
    "claim_b1_pointwise_check",
    "claim_normalized",
    "claim_threshold_scan",
    "energy_identity_check",
    "identity_refinement",
]


def _shifted(padded: np.ndarray, axis: int, offset: int) -> np.ndarray:
    """``padded`` shifted by ``offset`` along ``axis``, cropped by one layer on every axis."""
    index = [slice(1, -1)] * padded.ndim
    stop = padded.shape[axis] - 1 + offset
    index[axis] = slice(1 + offset, stop if stop < padded.shape[axis] else None)
    return padded[tuple(index)]


def padded_gradient(padded: np.ndarray, spacing: tuple[float, ...]) -> np.ndarray:
    """Centered gradient of a padded array, one layer smaller, components last."""
    return np.stack([(_shifted(padded, a, 1) - _shifted(padded, a, -1)) / (2.0 * h) for a, h in enumerate(spacing)], axis=-1)


def padded_laplacian(padded: np.ndarray, spacing: tuple[float, ...]) -> np.ndarray:
    """Standard second-difference Laplacian of a padded array, one layer smaller."""
    centre = _shifted(padded, 0, 0)
    return sum((_shifted(padded, a, 1) - 2.0 * centre + _shifted(padded, a, -1)) / h**2 for a, h in enumerate(spacing))


def _crop(values: np.ndarray, layers: int, dim: int) -> np.ndarray:
    if layers == 0:
        return values
    return values[tuple([slice(layers, -layers)] * dim)]


def _eta_on(eta: EtaField, grid: SpatialGrid, t: float, layers: int) -> np.ndarray:
    """eta at time ``t`` on ``grid`` (which may be finer than the grid of ``eta``)."""
    mesh = grid.mesh(layers)
    return np.asarray(eta.evaluator(mesh.reshape(-1, grid.dim), float(t)), dtype=float).reshape(mesh.shape[:-1])


def _zero_padded(values: np.ndarray) -> np.ndarray:
    return np.pad(values, 1, mode="constant")


class DecompositionReport(BaseModel):
    """Terms of the M1/M2 splitting at one time; ``residual`` is relative to the largest term."""

    model_config = ConfigDict(frozen=True)

    weighted_laplacian: float = Field(description="||exp(tau gamma) Delta z||^2")
    m1: float = Field(description="||M1 w||^2")
    m2: float = Field(description="||M2 w||^2")
    cross: float = Field(description="(M1 w, M2 w)")
    residual: float
    tau: float
    lam: float
    t: float
    h: float = Field(description="Largest grid spacing")
    claim_margin: float | None = Field(default=None, description="Worst normalized pointwise margin of the claim at this slice")

    def row(self) -> dict[str, float]:
        out = self.model_dump()
        out["claim_margin"] = np.nan if self.claim_margin is None else self.claim_margin
        return out


def _relative(defect: float, terms: list[float]) -> float:
    scale = max(abs(term) for term in terms)
    return abs(defect) / scale if scale > 0.0 else 0.0


def appendix_identity_check(
    z: ScalarField,
    tau: float,
    weights: WeightSet,
    t: float,
    lam: float | None = None,
    region: MovingRegion | None = None,
) -> DecompositionReport:
    """Evaluate both sides of the M1/M2 splitting for ``z`` with zero trace.

    The eta of ``weights`` is sampled on ``z.grid``, so a coarse weight set
    serves refinement studies. With ``region`` (omega1, same grids as the
    weights) the pointwise claim margin at the nearest slice is attached.
    """
    if z.is_complex:
        raise ValueError("the splitting is evaluated for real z")
    grid = z.grid
    lam = weights.lam if lam is None else lam
    dim, spacing = grid.dim, grid.spacing

    gamma_p = np.exp(lam * _eta_on(weights.eta, grid, t, 1))
    gamma = _crop(gamma_p, 1, dim)
    grad_gamma = padded_gradient(gamma_p, spacing)
    lap_gamma = padded_laplacian(gamma_p, spacing)
    exponent = tau * gamma
    factor = np.exp(exponent - exponent.max())

    w = factor * z.values
    w_p = _zero_padded(w)
    m1 = padded_laplacian(w_p, spacing) + tau**2 * np.sum(grad_gamma**2, axis=-1) * w
    m2 = 2.0 * tau * np.sum(grad_gamma * padded_gradient(w_p, spacing), axis=-1) + tau * lap_gamma * w
    weighted = factor * laplacian_values(z.values, grid)

    vol = grid.cell_volume
    lhs = float(np.sum(weighted**2) * vol)
    m1_sq = float(np.sum(m1**2) * vol)
    m2_sq = float(np.sum(m2**2) * vol)
    cross = float(np.sum(m1 * m2) * vol)
    residual = _relative(lhs - (m1_sq + m2_sq - 2.0 * cross), [lhs, m1_sq, m2_sq, cross])

    margin = None
    if region is not None:
        m = int(np.argmin(np.abs(region.time.nodes - t)))
        normalized = claim_normalized(weights.eta, region.grid, float(region.time.nodes[m]), lam, tau)
        margin = _min_or(normalized[~region.masks[m]], np.inf)
    return DecompositionReport(
        weighted_laplacian=lhs,
        m1=m1_sq,
        m2=m2_sq,
        cross=cross,
        residual=residual,
        tau=tau,
        lam=lam,
        t=t,
        h=max(spacing),
        claim_margin=margin,
    )


class IdentityRefinement(BaseModel):
    """Splitting residual on nested grids and the observed convergence orders."""

    model_config = ConfigDict(frozen=True)

    reports: list[DecompositionReport]
    orders: list[float] = Field(description="log(r_k / r_k+1) / log(h_k / h_k+1) per refinement")

    @property
    def order(self) -> float:
        """Order over the last refinement; NaN with fewer than two levels."""
        return self.orders[-1] if self.orders else float("nan")


def _orders(residuals: list[float], spacings: list[float]) -> list[float]:
    out = []
    for (r0, h0), (r1, h1) in zip(zip(residuals, spacings), zip(residuals[1:], spacings[1:])):
        out.append(float(np.log(r0 / r1) / np.log(h0 / h1)) if r0 > 0.0 and r1 > 0.0 else float("nan"))
    return out


def identity_refinement(
    fn: Callable[[np.ndarray], np.ndarray],
    grid: SpatialGrid,
    tau: float,
    weights: WeightSet,
    t: float,
    levels: int = 3,
    lam: float | None = None,
) -> IdentityRefinement:
    """Run :func:`appendix_identity_check` for ``fn`` sampled on ``grid`` refined ``levels - 1`` times."""
    if levels < 1:
        raise ValueError(f"levels must be at least 1, got {levels}")
    reports = []
    current = grid
    for _ in range(levels):
        reports.append(appendix_identity_check(ScalarField.from_function(current, fn), tau, weights, t, lam))
        current = current.refined(2)
    orders = _orders([report.residual for report in reports], [report.h for report in reports])
    logger.debug(f"splitting residuals {[f'{report.residual:.2e}' for report in reports]}, orders {orders}")
    return IdentityRefinement(reports=reports, orders=orders)


class EnergyIdentityReport(BaseModel):
    """``int |grad w|^2 - tau^2 int |grad gamma|^2 w^2 = int e g~ w - int e G . grad w``."""

    model_config = ConfigDict(frozen=True)

    gradient: float = Field(description="int |grad w|^2")
    zero_order: float = Field(description="tau^2 int |grad gamma|^2 w^2")
    source: float = Field(description="int exp(tau gamma) g~ w")
    flux: float = Field(description="int exp(tau gamma) G . grad w")
    residual: float = Field(description="|lhs - rhs| relative to the largest term")
    h: float

    @property
    def lhs(self) -> float:
        return self.gradient - self.zero_order

    @property
    def rhs(self) -> float:
        return self.source - self.flux


def energy_identity_check(z: ScalarField, G: np.ndarray, tau: float, weights: WeightSet, t: float, lam: float | None = None) -> EnergyIdentityReport:
    """Manufacture ``g = -Delta z - div G`` from (z, G) and compare both sides of the energy identity.

    ``g~ = g - tau grad gamma . G``.
    """
    grid = z.grid
    G = np.asarray(G, dtype=float)
    if G.shape != (*grid.shape, grid.dim):
        raise ValueError(f"G has shape {G.shape}, expected {(*grid.shape, grid.dim)}")
    lam = weights.lam if lam is None else lam
    g = -laplacian_values(z.values, grid) - divergence(G, grid)

    gamma_p = np.exp(lam * _eta_on(weights.eta, grid, t, 1))
    gamma = _crop(gamma_p, 1, grid.dim)
    grad_gamma = padded_gradient(gamma_p, grid.spacing)
    exponent = tau * gamma
    factor = np.exp(exponent - exponent.max())

    w = factor * z.values
    grad_w = gradient_values(w, grid)
    g_tilde = g - tau * np.sum(grad_gamma * G, axis=-1)
    vol = grid.cell_volume
    gradient = float(np.sum(grad_w**2) * vol)
    zero_order = tau**2 * float(np.sum(np.sum(grad_gamma**2, axis=-1) * w**2) * vol)
    source = float(np.sum(factor * g_tilde * w) * vol)
    flux = float(np.sum(factor * np.sum(G * grad_w, axis=-1)) * vol)
    residual = _relative((gradient - zero_order) - (source - flux), [gradient, zero_order, source, flux])
    return EnergyIdentityReport(gradient=gradient, zero_order=zero_order, source=source, flux=flux, residual=residual, h=max(grid.spacing))


def claim_normalized(eta: EtaField, grid: SpatialGrid, t: float, lam: float, tau: float) -> np.ndarray:
    """``(2 tau^3 grad gamma . grad |grad gamma|^2 - tau Delta^2 gamma) / (tau^3 lambda^4 gamma^3)`` at interior nodes.

    Evaluated with ``gamma / exp(lambda max eta)``; zero where the scale vanishes (lambda = 0).
    """
    if lam == 0.0:
        return np.zeros(grid.shape)
    eta_p = _eta_on(eta, grid, t, 2)
    top = float(eta_p.max())
    gamma_p = np.exp(lam * (eta_p - top))
    spacing = grid.spacing

    grad_gamma = padded_gradient(gamma_p, spacing)
    transport = 2.0 * np.sum(_crop(grad_gamma, 1, grid.dim) * padded_gradient(np.sum(grad_gamma**2, axis=-1), spacing), axis=-1)
    bilaplacian = padded_laplacian(padded_laplacian(gamma_p, spacing), spacing)
    gamma = _crop(gamma_p, 2, grid.dim)
    numerator = transport - bilaplacian * np.exp(-2.0 * lam * top) / tau**2
    return numerator / (lam**4 * gamma**3)


def _min_or(values: np.ndarray, default: float) -> float:
    return float(np.min(values)) if values.size else default


class ClaimReport(BaseModel):
    """Pointwise claim on every slice: lower bound off omega1, upper bound on it."""

    model_config = ConfigDict(frozen=True)

    lam: float
    tau: float
    margin_off: float = Field(description="Smallest normalized value off the region; the claim needs it positive")
    bound_on: float = Field(description="Largest normalized absolute value on the region")
    implied_a: float = Field(description="Largest A satisfying both bounds; NaN when the lower bound fails")
    worst_slice: int
    slice_margins: list[float]

    @property
    def passed(self) -> bool:
        return self.margin_off > 0.0

    def row(self) -> dict[str, float | bool]:
        return {"lam": self.lam, "tau": self.tau, "margin_off": self.margin_off, "bound_on": self.bound_on, "implied_a": self.implied_a, "passed": self.passed}


def claim_b1_pointwise_check(eta: EtaField, lam: float, tau: float, region: MovingRegion) -> ClaimReport:
    """Evaluate the normalized claim quantity at every node and slice of ``region`` (omega1)."""
    if region.grid != eta.grid or region.time != eta.time:
        raise ValueError("eta and the omega1 region must share grids")
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    margins, bounds = [], []
    for m, t in enumerate(region.time.nodes):
        normalized = claim_normalized(eta, region.grid, float(t), lam, tau)
        mask = region.masks[m]
        margins.append(_min_or(normalized[~mask], np.inf))
        bounds.append(float(np.max(np.abs(normalized[mask]))) if mask.any() else 0.0)
    margin_off = float(min(margins))
    bound_on = float(max(bounds))
    if margin_off > 0.0:
        implied = min(margin_off, 3.0 / bound_on) if bound_on > 0.0 else margin_off
    else:
        implied = float("nan")
    report = ClaimReport(
        lam=lam,
        tau=tau,
        margin_off=margin_off,
        bound_on=bound_on,
        implied_a=implied,
        worst_slice=int(np.argmin(margins)),
        slice_margins=margins,
    )
    logger.debug(f"claim at lambda={lam:g}, tau={tau:g}: margin {margin_off:.3e}, on-region bound {bound_on:.3e}")
    return report


class ClaimScan(BaseModel):
    model_config = ConfigDict(frozen=True)

    reports: list[ClaimReport]

    @property
    def threshold(self) -> float | None:
        """Smallest scanned lambda from which every larger one passes."""
        out = None
        for report in reversed(self.reports):
            if not report.passed:
                break
            out = report.lam
        return out


def claim_threshold_scan(eta: EtaField, region: MovingRegion, tau: float, lambdas: list[float]) -> ClaimScan:
    """Claim reports for increasing lambda."""
    if any(b <= a for a, b in zip(lambdas, lambdas[1:])):
        raise ValueError(f"lambdas must be strictly increasing, got {lambdas}")
    scan = ClaimScan(reports=[claim_b1_pointwise_check(eta, lam, tau, region) for lam in lambdas])
    if scan.threshold is None:
        logger.warning(f"claim fails at every scanned lambda up to {lambdas[-1]:g}")
    return scan
