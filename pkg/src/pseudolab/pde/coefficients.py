"""Advection field A(x, t) of the BBM equation."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from pseudolab.grid import SpatialGrid, TimeGrid, divergence

# (points (P, dim), t) -> A (P, dim)
CoefficientEvaluator = Callable[[np.ndarray, float], np.ndarray]


class BBMCoefficients(BaseModel):
    """A vector field A(x, t); ``stationary`` lets solvers factor once."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dim: int = Field(ge=1, le=2)
    evaluator: CoefficientEvaluator
    stationary: bool = False
    label: str = "custom"

    @classmethod
    def zero(cls, dim: int) -> BBMCoefficients:
        return cls(dim=dim, evaluator=lambda x, t: np.zeros_like(x), stationary=True, label="zero")

    @classmethod
    def constant(cls, vector: tuple[float, ...]) -> BBMCoefficients:
        a = np.asarray(vector, dtype=float)
        return cls(dim=len(a), evaluator=lambda x, t: np.broadcast_to(a, x.shape).copy(), stationary=True, label="constant")

    def at(self, grid: SpatialGrid, t: float) -> np.ndarray:
        """A on the interior nodes at time ``t``, shape ``(*grid.shape, dim)``."""
        points = grid.points()
        return np.asarray(self.evaluator(points, float(t)), dtype=float).reshape((*grid.shape, grid.dim))

    def sample(self, grid: SpatialGrid, time: TimeGrid) -> np.ndarray:
        """A on every slice, shape ``(M + 1, *grid.shape, dim)``."""
        if grid.dim != self.dim:
            raise ValueError(f"coefficient dimension {self.dim} does not match grid dimension {grid.dim}")
        if self.stationary:
            return np.broadcast_to(self.at(grid, 0.0), (time.count, *grid.shape, grid.dim))
        return np.stack([self.at(grid, t) for t in time.nodes])

    def bounds(self, grid: SpatialGrid, time: TimeGrid) -> dict[str, float]:
        """Sampled sup norms of A, div A, A_t and div A_t on the grid."""
        values = np.asarray(self.sample(grid, time))
        div = divergence(values, grid)
        rate = np.gradient(values, time.dt, axis=0)
        div_rate = np.gradient(div, time.dt, axis=0)
        return {
            "A": float(np.max(np.abs(values))),
            "div_A": float(np.max(np.abs(div))),
            "A_t": float(np.max(np.abs(rate))),
            "div_A_t": float(np.max(np.abs(div_rate))),
        }

    def is_finite(self, grid: SpatialGrid, time: TimeGrid) -> bool:
        return all(np.isfinite(value) for value in self.bounds(grid, time).values())
