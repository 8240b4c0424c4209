"""Reference sets, rasterized moving regions and their smooth indicators."""

from __future__ import annotations

import logging
import math
from typing import Annotated, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import ndimage

from pseudolab.flow.flowmap import FlowMap
from pseudolab.grid import SpaceTimeField, SpatialGrid, TimeGrid

logger = logging.getLogger(__name__)


class BoxRegion(BaseModel):
    """Open box (interval in 1D, rectangle in 2D)."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["box"] = "box"
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    @model_validator(mode="after")
    def _check_corners(self) -> BoxRegion:
        if len(self.lower) != len(self.upper):
            raise ValueError("box corners must have the same dimension")
        if any(hi <= lo for lo, hi in zip(self.lower, self.upper)):
            raise ValueError(f"empty box {self.lower} - {self.upper}")
        return self

    @property
    def dim(self) -> int:
        return len(self.lower)

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        return np.all((points > np.asarray(self.lower)) & (points < np.asarray(self.upper)), axis=-1)

    def dilate(self, margin: float) -> BoxRegion:
        return BoxRegion(lower=tuple(v - margin for v in self.lower), upper=tuple(v + margin for v in self.upper))


class BallRegion(BaseModel):
    """Open ball."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["ball"] = "ball"
    center: tuple[float, ...]
    radius: float = Field(gt=0)

    @property
    def dim(self) -> int:
        return len(self.center)

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        return np.linalg.norm(points - np.asarray(self.center), axis=-1) < self.radius

    def dilate(self, margin: float) -> BallRegion:
        return BallRegion(center=self.center, radius=self.radius + margin)


RegionShape = Annotated[BoxRegion | BallRegion, Field(discriminator="kind")]


class MovingRegion(BaseModel):
    """Time sections O(t_m) of a region transported by a flow, plus its indicator."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    reference: RegionShape
    grid: SpatialGrid
    time: TimeGrid
    masks: np.ndarray = Field(description="Boolean masks of shape (M + 1, *grid.shape)")
    chi: SpaceTimeField
    rho: float
    flow: FlowMap | None = None

    @model_validator(mode="after")
    def _check_masks(self) -> MovingRegion:
        expected = (self.time.count, *self.grid.shape)
        if self.masks.shape != expected:
            raise ValueError(f"masks have shape {self.masks.shape}, expected {expected}")
        masks = np.array(self.masks, dtype=bool)
        masks.flags.writeable = False
        object.__setattr__(self, "masks", masks)
        return self

    @property
    def is_static(self) -> bool:
        return bool(np.all(self.masks == self.masks[0]))

    def closure_masks(self) -> np.ndarray:
        """One-cell dilation of every slice; the discrete closure of O(t_m)."""
        return np.stack([_dilate_once(mask) for mask in self.masks])

    def coverage(self) -> np.ndarray:
        """Union of all sections."""
        return np.any(self.masks, axis=0)

    def with_rho(self, rho: float) -> MovingRegion:
        return self.model_copy(update={"rho": rho, "chi": smooth_indicator(self, rho)})


def _dilate_once(mask: np.ndarray) -> np.ndarray:
    structure = ndimage.generate_binary_structure(mask.ndim, 1)
    return ndimage.binary_dilation(mask, structure=structure)


def _ramp(u: np.ndarray) -> np.ndarray:
    """C2 smoothstep 6u^5 - 15u^4 + 10u^3 on [0, 1]."""
    return u**3 * (10.0 - 15.0 * u + 6.0 * u**2)


def indicator_values(masks: np.ndarray, grid: SpatialGrid, rho: float) -> np.ndarray:
    """Smooth indicator of each mask slice.

    Depth is the Euclidean distance to the nearest node outside the mask; the
    mask is edge-padded first so sections that leave the domain are not cut
    off at the boundary.

    Raises:
        ValueError: If ``rho`` is below two grid cells.
    """
    if rho < 2.0 * max(grid.spacing) * (1.0 - 1e-12):
        raise ValueError(f"rho={rho} is smaller than twice the grid spacing {max(grid.spacing)}")
    pad = math.ceil(rho / min(grid.spacing)) + 1
    out = np.zeros(masks.shape, dtype=float)
    core = tuple(slice(pad, pad + count) for count in grid.n)
    for m, mask in enumerate(masks):
        if not mask.any():
            continue
        padded = np.pad(mask, pad, mode="edge")
        if padded.all():
            out[m] = 1.0
            continue
        depth = ndimage.distance_transform_edt(padded, sampling=grid.spacing)[core]
        out[m] = np.where(mask, _ramp(np.clip(depth / rho, 0.0, 1.0)), 0.0)
    return out


def smooth_indicator(region: MovingRegion, rho: float) -> SpaceTimeField:
    """chi in [0, 1]: 1 at depth >= rho inside each section, 0 outside it."""
    return SpaceTimeField(grid=region.grid, time=region.time, values=indicator_values(region.masks, region.grid, rho))


def default_rho(grid: SpatialGrid) -> float:
    return 2.0 * max(grid.spacing)


def _build(reference: RegionShape, grid: SpatialGrid, time: TimeGrid, masks: np.ndarray, rho: float | None, flow: FlowMap | None) -> MovingRegion:
    rho = default_rho(grid) if rho is None else rho
    chi = SpaceTimeField(grid=grid, time=time, values=indicator_values(masks, grid, rho))
    return MovingRegion(reference=reference, grid=grid, time=time, masks=masks, chi=chi, rho=rho, flow=flow)


def rasterize_region(flow: FlowMap, reference: RegionShape, grid: SpatialGrid, time: TimeGrid, rho: float | None = None) -> MovingRegion:
    """Mark node x at t_m iff X(x, 0, t_m) lies in the reference set.

    All (slice, node) pairs are pulled back in one vectorized pass.
    """
    if reference.dim != grid.dim or flow.dim != grid.dim:
        raise ValueError(f"region dimension {reference.dim} and flow dimension {flow.dim} must match grid dimension {grid.dim}")
    points = grid.points()
    starts = np.repeat(time.nodes, grid.size)
    stacked = np.tile(points, (time.count, 1))
    pulled = flow.integrate(stacked, starts, 0.0)
    masks = reference.contains(pulled).reshape((time.count, *grid.shape))
    logger.debug(f"rasterized {reference.kind} region on {time.count} slices, mean coverage {masks.mean():.3f}")
    return _build(reference, grid, time, masks, rho, flow)


def static_region(reference: RegionShape, grid: SpatialGrid, time: TimeGrid, rho: float | None = None) -> MovingRegion:
    """A region that does not move: every section equals the reference set."""
    mask = reference.contains(grid.points()).reshape(grid.shape)
    masks = np.broadcast_to(mask, (time.count, *grid.shape))
    return _build(reference, grid, time, masks, rho, None)


class NestedRegions(BaseModel):
    """omega0 < omega1 < omega2 < omega3 < omega obtained by successive dilations."""

    model_config = ConfigDict(frozen=True)

    omega0: RegionShape
    margins: tuple[float, float, float, float] = (0.02, 0.04, 0.05, 0.05)

    def level(self, index: int) -> BoxRegion | BallRegion:
        """``level(0)`` is omega0, ``level(4)`` the outermost set omega."""
        if not 0 <= index <= 4:
            raise ValueError(f"nesting level must be in 0..4, got {index}")
        return self.omega0.dilate(sum(self.margins[:index])) if index else self.omega0

    @property
    def omega1(self) -> BoxRegion | BallRegion:
        return self.level(1)

    @property
    def omega2(self) -> BoxRegion | BallRegion:
        return self.level(2)

    @property
    def omega3(self) -> BoxRegion | BallRegion:
        return self.level(3)

    @property
    def omega(self) -> BoxRegion | BallRegion:
        return self.level(4)
