"""The standard 1D sweep: an interval translated across Omega = (0, 1) at constant speed."""

from __future__ import annotations

import numpy as np
from pydantic import BaseModel, Field

from pseudolab.flow.flowmap import FlowMap
from pseudolab.flow.regions import BoxRegion, MovingRegion, NestedRegions, rasterize_region
from pseudolab.flow.velocity import VelocityField
from pseudolab.grid import SpatialGrid, TimeGrid


class SweepConfig(BaseModel):
    """Sweep of an interval of width ``width`` whose centre moves from ``start_center`` by ``travel`` over [0, T].

    The defaults start just left of Omega so that every section meets Omega,
    and end past the right end so the union of sections covers the closure.
    """

    width: float = Field(default=0.3, gt=0, description="Length of the reference interval omega0")
    start_center: float = Field(default=-0.05, description="Centre of omega0 at t = 0")
    travel: float = Field(default=1.1, gt=0, description="Distance travelled by the centre over [0, T]")
    dt_flow: float = Field(default=1e-3, gt=0, description="RK4 step of the flow integrator")

    def reference(self) -> BoxRegion:
        half = 0.5 * self.width
        return BoxRegion(lower=(self.start_center - half,), upper=(self.start_center + half,))

    def velocity(self, horizon: float) -> VelocityField:
        return VelocityField.constant((self.travel / horizon,))

    def flow(self, horizon: float) -> FlowMap:
        return FlowMap(velocity=self.velocity(horizon), dt_flow=self.dt_flow)

    def center(self, t: np.ndarray | float, horizon: float) -> np.ndarray:
        return self.start_center + self.travel * np.asarray(t, dtype=float) / horizon

    def nested(self, margins: tuple[float, float, float, float] = (0.02, 0.04, 0.05, 0.05)) -> NestedRegions:
        return NestedRegions(omega0=self.reference(), margins=margins)

    def region(
        self,
        grid: SpatialGrid,
        time: TimeGrid,
        level: int = 0,
        rho: float | None = None,
        margins: tuple[float, float, float, float] = (0.02, 0.04, 0.05, 0.05),
    ) -> MovingRegion:
        """Rasterize the nested set at ``level`` (0 is omega0) along the sweep."""
        return rasterize_region(self.flow(time.horizon), self.nested(margins).level(level), grid, time, rho)
