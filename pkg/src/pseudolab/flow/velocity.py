"""Velocity fields F(x, t) generating the flow maps of moving control regions."""

from __future__ import annotations

from collections.abc import Callable
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from pseudolab.grid import SpatialGrid, TimeGrid

# (points (P, dim), times (P,)) -> velocities (P, dim)
VelocityEvaluator = Callable[[np.ndarray, np.ndarray], np.ndarray]


class VelocityField(BaseModel):
    """A vectorized velocity field with a Lipschitz estimate."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dim: int = Field(ge=1, le=2)
    evaluator: VelocityEvaluator
    lipschitz: float = Field(ge=0, description="Lipschitz bound estimate in x")
    label: str = "custom"

    def __call__(self, points: np.ndarray, times: np.ndarray | float) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        times = np.broadcast_to(np.asarray(times, dtype=float), (points.shape[0],))
        return np.asarray(self.evaluator(points, times), dtype=float).reshape(points.shape)

    def sup_norm(self, grid: SpatialGrid, time: TimeGrid) -> float:
        """Sampled max of |F| over the closed box and all time nodes."""
        points = grid.points(layers=1)
        best = 0.0
        for t in time.nodes:
            best = max(best, float(np.max(np.linalg.norm(self(points, t), axis=-1))))
        return best

    def is_bounded(self, grid: SpatialGrid, time: TimeGrid) -> bool:
        return bool(np.isfinite(self.sup_norm(grid, time)))

    @classmethod
    def zero(cls, dim: int) -> VelocityField:
        return cls(dim=dim, evaluator=lambda x, t: np.zeros_like(x), lipschitz=0.0, label="zero")

    @classmethod
    def constant(cls, vector: tuple[float, ...]) -> VelocityField:
        c = np.asarray(vector, dtype=float)
        return cls(dim=len(c), evaluator=lambda x, t: np.broadcast_to(c, x.shape).copy(), lipschitz=0.0, label="constant")

    @classmethod
    def linear(cls, rate: float, dim: int = 1) -> VelocityField:
        """F(x, t) = rate * x."""
        return cls(dim=dim, evaluator=lambda x, t: rate * x, lipschitz=abs(rate), label="linear")

    @classmethod
    def rotation(cls, center: tuple[float, float], rate: float = 1.0) -> VelocityField:
        """Rigid rotation about ``center``: F = rate * (-(x2 - c2), x1 - c1)."""
        c = np.asarray(center, dtype=float)

        def _rotate(x: np.ndarray, t: np.ndarray) -> np.ndarray:
            d = x - c
            return rate * np.stack([-d[:, 1], d[:, 0]], axis=-1)

        return cls(dim=2, evaluator=_rotate, lipschitz=abs(rate), label="rotation")


class VelocitySpec(BaseModel):
    """Configuration form of a velocity field."""

    kind: Literal["zero", "constant", "linear", "rotation"] = Field(default="constant", description="Velocity family")
    vector: tuple[float, ...] = Field(default=(1.0,), description="Constant velocity (kind=constant)")
    rate: float = Field(default=1.0, description="Rate for linear and rotation fields")
    center: tuple[float, float] = Field(default=(0.5, 0.5), description="Rotation center (kind=rotation)")

    def build(self, dim: int) -> VelocityField:
        if self.kind == "zero":
            return VelocityField.zero(dim)
        if self.kind == "constant":
            if len(self.vector) != dim:
                raise ValueError(f"constant velocity has {len(self.vector)} components, grid dimension is {dim}")
            return VelocityField.constant(self.vector)
        if self.kind == "linear":
            return VelocityField.linear(self.rate, dim)
        if dim != 2:
            raise ValueError("rotation velocity requires a 2D grid")
        return VelocityField.rotation(self.center, self.rate)
