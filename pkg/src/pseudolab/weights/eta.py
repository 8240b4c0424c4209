"""The weight function eta and its construction for the 1D sweep."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np
from pydantic import BaseModel, Field

from pseudolab.flow import SweepConfig
from pseudolab.grid import SpaceTimeField, SpatialGrid, TimeGrid

# (points (P, dim), t) -> values (P,)
EtaEvaluator = Callable[[np.ndarray, float], np.ndarray]


class EtaField(SpaceTimeField):
    """Samples of eta plus the analytic evaluator they came from.

    The evaluator lets the certification and the Carleman code sample eta on
    ghost layers beyond the boundary and at intermediate times.
    """

    evaluator: EtaEvaluator

    @classmethod
    def from_evaluator(cls, grid: SpatialGrid, time: TimeGrid, evaluator: EtaEvaluator) -> EtaField:
        points = grid.points()
        values = np.stack([np.asarray(evaluator(points, float(t)), dtype=float).reshape(grid.shape) for t in time.nodes])
        return cls(grid=grid, time=time, values=values, evaluator=evaluator)

    def at(self, t: float, layers: int = 0) -> np.ndarray:
        """eta at time ``t`` on the grid extended by ``layers``."""
        mesh = self.grid.mesh(layers)
        return np.asarray(self.evaluator(mesh.reshape(-1, self.grid.dim), float(t)), dtype=float).reshape(mesh.shape[:-1])

    def padded_values(self, layers: int = 1) -> np.ndarray:
        """Samples of shape ``(M + 1, *(n + 2 * layers))``."""
        return np.stack([self.at(t, layers) for t in self.time.nodes])

    def time_derivative(self, layers: int = 0) -> np.ndarray:
        """Centered eta_t with half-step offsets ``(eta(t + dt/2) - eta(t - dt/2)) / dt``."""
        half = 0.5 * self.time.dt
        return np.stack([(self.at(t + half, layers) - self.at(t - half, layers)) / self.time.dt for t in self.time.nodes])

    def sup_norm(self) -> float:
        """max |eta| over the closed domain and all time nodes."""
        return float(np.max(np.abs(self.padded_values(1))))

    def shifted(self, constant: float) -> EtaField:
        base = self.evaluator
        return EtaField.from_evaluator(self.grid, self.time, lambda x, t: base(x, t) + constant)


class EtaProfile(BaseModel):
    """Shape parameters of eta = B + b * psi0((x - p(t)) / L), psi0(s) = kappa - sqrt(s^2 + kappa^2)."""

    base: float = Field(default=1.0, gt=0, description="Level B; the maximum of eta")
    amplitude: float = Field(default=0.25, gt=0, description="Amplitude b of the profile")
    kappa: float = Field(default=0.05, gt=0, description="Rounding of the profile tip")
    length: float = Field(default=1.0, gt=0, description="Length scale L")
    inset: float = Field(default=0.05, gt=0, lt=0.5, description="Distance kept between the anchor path and the boundary")


def psi0(s: np.ndarray, kappa: float) -> np.ndarray:
    return kappa - np.sqrt(s**2 + kappa**2)


def anchor_path(sweep: SweepConfig, horizon: float, inset: float) -> Callable[[float], float]:
    """Straight path between the sweep centres at 0 and T, clipped into [inset, 1 - inset]."""
    start = float(np.clip(sweep.center(0.0, horizon), inset, 1.0 - inset))
    end = float(np.clip(sweep.center(horizon, horizon), inset, 1.0 - inset))
    return lambda t: start + (end - start) * t / horizon


def build_eta_sweep_1d(sweep: SweepConfig, grid: SpatialGrid, time: TimeGrid, profile: EtaProfile | None = None) -> EtaField:
    """eta for the standard sweep on Omega = (0, 1).

    The gradient vanishes only on the anchor path, which stays inside the
    moving interval; eta_t has the sign of ``x - p(t)``, so it is positive to
    the right of the region at early times and negative to its left at late
    times. Use :func:`check_weight_properties` to certify the result.
    """
    if grid.dim != 1:
        raise ValueError("the sweep construction is one-dimensional")
    profile = profile or EtaProfile()
    path = anchor_path(sweep, time.horizon, profile.inset)

    def _eta(points: np.ndarray, t: float) -> np.ndarray:
        s = (points[:, 0] - path(t)) / profile.length
        return profile.base + profile.amplitude * psi0(s, profile.kappa)

    return EtaField.from_evaluator(grid, time, _eta)
