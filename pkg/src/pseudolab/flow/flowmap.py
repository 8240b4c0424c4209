"""Flow maps X(x, t, t0) integrated with classical RK4."""

from __future__ import annotations

import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from pseudolab.exceptions import TrajectoryEscapedError
from pseudolab.flow.velocity import VelocityField

logger = logging.getLogger(__name__)

# Points integrated per batch; bounds peak memory for large rasterizations
_CHUNK = 65_536


class FlowMap(BaseModel):
    """Flow of a velocity field with a fixed integrator step."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    velocity: VelocityField
    dt_flow: float = Field(default=1e-3, gt=0, description="RK4 step size")
    bounding_box: float = Field(default=1e3, gt=0, description="Trajectories must stay in [-box, box]^N")

    @property
    def dim(self) -> int:
        return self.velocity.dim

    def integrate(self, points: np.ndarray, t0: np.ndarray | float, t1: np.ndarray | float) -> np.ndarray:
        """Integrate many points, each from its own ``t0`` to its own ``t1``.

        Every point takes the same number of steps ``ceil(max|t1 - t0| / dt_flow)``
        with its own step ``(t1 - t0) / n``; backward integration is allowed and
        ``t1 == t0`` returns the point unchanged.
        """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        count = points.shape[0]
        start = np.broadcast_to(np.asarray(t0, dtype=float), (count,))
        stop = np.broadcast_to(np.asarray(t1, dtype=float), (count,))
        out = np.empty_like(points)
        for lo in range(0, count, _CHUNK):
            hi = min(lo + _CHUNK, count)
            out[lo:hi] = self._integrate_chunk(points[lo:hi], start[lo:hi], stop[lo:hi])
        return out

    def _integrate_chunk(self, x: np.ndarray, t0: np.ndarray, t1: np.ndarray) -> np.ndarray:
        span = t1 - t0
        longest = float(np.max(np.abs(span))) if span.size else 0.0
        if longest == 0.0:
            return x.copy()
        steps = math.ceil(longest / self.dt_flow - 1e-12)
        h = (span / steps)[:, None]
        t = t0.copy()
        x = x.copy()
        F = self.velocity
        for _ in range(steps):
            k1 = F(x, t)
            k2 = F(x + 0.5 * h * k1, t + 0.5 * h[:, 0])
            k3 = F(x + 0.5 * h * k2, t + 0.5 * h[:, 0])
            k4 = F(x + h * k3, t + h[:, 0])
            x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t = t + h[:, 0]
            if np.any(np.abs(x) > self.bounding_box):
                raise TrajectoryEscapedError(f"trajectory left the box [-{self.bounding_box}, {self.bounding_box}]^{self.dim}")
        return x


def integrate_flow(flow: FlowMap, x: np.ndarray | float, t0: float, t1: float) -> np.ndarray:
    """X(x, t1, t0) for a single point or a batch of points of shape ``(P, dim)``."""
    array = np.asarray(x, dtype=float)
    if array.ndim <= 1 and array.size == flow.dim:
        return flow.integrate(array.reshape(1, flow.dim), t0, t1)[0]
    return flow.integrate(array.reshape(-1, flow.dim), t0, t1)
