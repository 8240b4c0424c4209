"""Tensor grids on boxes and the sampled fields that live on them.

Interior nodes of an axis with ``n`` points on ``[lower, upper]`` sit at
``lower + (i + 1) * h`` for ``i = 0..n-1`` with ``h = (upper - lower) / (n + 1)``;
the boundary nodes carry homogeneous Dirichlet data unless a trace is supplied.
Field values are stored with the spatial shape (C order, axis 0 slowest).
"""

from __future__ import annotations

from collections.abc import Callable

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

PointFunction = Callable[[np.ndarray], np.ndarray]
SpaceTimeFunction = Callable[[np.ndarray, float], np.ndarray]


def _frozen_array(values: np.ndarray) -> np.ndarray:
    array = np.array(values, copy=True)
    array.flags.writeable = False
    return array


class SpatialGrid(BaseModel):
    """Uniform grid of interior nodes on a box in R^1 or R^2."""

    model_config = ConfigDict(frozen=True)

    bounds: tuple[tuple[float, float], ...] = Field(description="Per-axis (lower, upper) interval")
    n: tuple[int, ...] = Field(description="Per-axis interior point count")

    @model_validator(mode="after")
    def _check_shape(self) -> SpatialGrid:
        if len(self.bounds) not in (1, 2):
            raise ValueError(f"grid dimension must be 1 or 2, got {len(self.bounds)}")
        if len(self.n) != len(self.bounds):
            raise ValueError("bounds and n must have the same length")
        for lower, upper in self.bounds:
            if not upper > lower:
                raise ValueError(f"empty interval ({lower}, {upper})")
        if any(count < 3 for count in self.n):
            raise ValueError(f"every axis needs at least 3 interior points, got {self.n}")
        return self

    @classmethod
    def interval(cls, lower: float, upper: float, n: int) -> SpatialGrid:
        return cls(bounds=((lower, upper),), n=(n,))

    @classmethod
    def rectangle(cls, lower: tuple[float, float], upper: tuple[float, float], n: tuple[int, int]) -> SpatialGrid:
        return cls(bounds=((lower[0], upper[0]), (lower[1], upper[1])), n=n)

    @property
    def dim(self) -> int:
        return len(self.n)

    @property
    def lower(self) -> np.ndarray:
        return np.array([b[0] for b in self.bounds])

    @property
    def upper(self) -> np.ndarray:
        return np.array([b[1] for b in self.bounds])

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple((upper - lower) / (count + 1) for (lower, upper), count in zip(self.bounds, self.n))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.n

    @property
    def size(self) -> int:
        return int(np.prod(self.n))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axes(self, layers: int = 0) -> list[np.ndarray]:
        """Node coordinates per axis, extended by ``layers`` nodes beyond each side.

        ``layers=1`` adds the boundary nodes, ``layers=2`` one ghost layer more.
        """
        out = []
        for (lower, _), count, h in zip(self.bounds, self.n, self.spacing):
            index = np.arange(-layers, count + layers)
            out.append(lower + (index + 1) * h)
        return out

    def mesh(self, layers: int = 0) -> np.ndarray:
        """Coordinates with shape ``(*shape, dim)`` (extended by ``layers``)."""
        return np.stack(np.meshgrid(*self.axes(layers), indexing="ij"), axis=-1)

    def points(self, layers: int = 0) -> np.ndarray:
        """Coordinates as a flat ``(size, dim)`` array."""
        return self.mesh(layers).reshape(-1, self.dim)

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Open-box membership test for points of shape ``(P, dim)``."""
        points = np.atleast_2d(points)
        return np.all((points > self.lower) & (points < self.upper), axis=-1)

    def refined(self, factor: int = 2) -> SpatialGrid:
        """Grid with spacing divided by ``factor`` (nodes nest)."""
        return SpatialGrid(bounds=self.bounds, n=tuple(factor * (count + 1) - 1 for count in self.n))


class TimeGrid(BaseModel):
    """Uniform time nodes ``t_m = m * dt`` on ``[0, T]``."""

    model_config = ConfigDict(frozen=True)

    horizon: float = Field(gt=0, description="Final time T")
    steps: int = Field(ge=2, description="Number of steps M")

    @property
    def dt(self) -> float:
        return self.horizon / self.steps

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.steps + 1) * self.dt

    @property
    def count(self) -> int:
        return self.steps + 1

    def refined(self, factor: int = 2) -> TimeGrid:
        return TimeGrid(horizon=self.horizon, steps=self.steps * factor)

    def trapezoid_weights(self) -> np.ndarray:
        weights = np.full(self.steps + 1, self.dt)
        weights[0] = weights[-1] = 0.5 * self.dt
        return weights


class ScalarField(BaseModel):
    """One real or complex value per interior node."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: SpatialGrid
    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def _as_array(cls, values: object) -> np.ndarray:
        return np.asarray(values)

    @model_validator(mode="after")
    def _check_values(self) -> ScalarField:
        if self.values.size != self.grid.size:
            raise ValueError(f"field has {self.values.size} values, grid has {self.grid.size} nodes")
        object.__setattr__(self, "values", _frozen_array(self.values.reshape(self.grid.shape)))
        return self

    @classmethod
    def zeros(cls, grid: SpatialGrid, dtype: type = float) -> ScalarField:
        return cls(grid=grid, values=np.zeros(grid.shape, dtype=dtype))

    @classmethod
    def from_function(cls, grid: SpatialGrid, fn: PointFunction) -> ScalarField:
        """Sample ``fn(points)`` with points of shape ``(size, dim)``."""
        return cls(grid=grid, values=np.asarray(fn(grid.points())).reshape(grid.shape))

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    @property
    def is_complex(self) -> bool:
        return bool(np.iscomplexobj(self.values))

    def with_values(self, values: np.ndarray) -> ScalarField:
        return ScalarField(grid=self.grid, values=values)

    def norm(self) -> float:
        """Discrete L2(Omega) norm."""
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.grid.cell_volume))


class SpaceTimeField(BaseModel):
    """Values on ``M + 1`` time slices of a spatial grid, shape ``(M + 1, *grid.shape)``."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: SpatialGrid
    time: TimeGrid
    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def _as_array(cls, values: object) -> np.ndarray:
        return np.asarray(values)

    @model_validator(mode="after")
    def _check_values(self) -> SpaceTimeField:
        expected = self.time.count * self.grid.size
        if self.values.size != expected:
            raise ValueError(f"space-time field has {self.values.size} values, expected {self.time.count} x {self.grid.size}")
        object.__setattr__(self, "values", _frozen_array(self.values.reshape((self.time.count, *self.grid.shape))))
        return self

    @classmethod
    def zeros(cls, grid: SpatialGrid, time: TimeGrid, dtype: type = float) -> SpaceTimeField:
        return cls(grid=grid, time=time, values=np.zeros((time.count, *grid.shape), dtype=dtype))

    @classmethod
    def from_function(cls, grid: SpatialGrid, time: TimeGrid, fn: SpaceTimeFunction) -> SpaceTimeField:
        """Sample ``fn(points, t)`` on every slice."""
        points = grid.points()
        values = np.stack([np.asarray(fn(points, float(t))).reshape(grid.shape) for t in time.nodes])
        return cls(grid=grid, time=time, values=values)

    @classmethod
    def constant_in_time(cls, field: ScalarField, time: TimeGrid) -> SpaceTimeField:
        values = np.broadcast_to(field.values, (time.count, *field.grid.shape))
        return cls(grid=field.grid, time=time, values=values)

    @property
    def flat(self) -> np.ndarray:
        """Values as ``(M + 1, size)``."""
        return self.values.reshape(self.time.count, -1)

    @property
    def is_complex(self) -> bool:
        return bool(np.iscomplexobj(self.values))

    def slice(self, m: int) -> ScalarField:
        return ScalarField(grid=self.grid, values=self.values[m])

    def initial(self) -> ScalarField:
        return self.slice(0)

    def final(self) -> ScalarField:
        return self.slice(self.time.steps)

    def with_values(self, values: np.ndarray) -> SpaceTimeField:
        return SpaceTimeField(grid=self.grid, time=self.time, values=values)
