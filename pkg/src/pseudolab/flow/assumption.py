"""Grid-level checks that a moving region sweeps the whole domain."""

from __future__ import annotations

import logging

import numpy as np
from pydantic import BaseModel, Field
from scipy import ndimage

from pseudolab.flow.flowmap import FlowMap
from pseudolab.flow.regions import MovingRegion, RegionShape, rasterize_region
from pseudolab.grid import SpatialGrid, TimeGrid

logger = logging.getLogger(__name__)


class RegionAssumptionReport(BaseModel):
    """Outcome of each condition with the witness that decided it."""

    curve_inside: bool = Field(description="Gamma(t) lies in the section and in Omega at every slice")
    covered: bool = Field(description="The sections cover every node")
    complement_connected: bool = Field(description="Complement of the closed section is nonempty and connected outside (t1, t2)")
    two_components: bool = Field(description="Complement has exactly two components on (t1, t2)")
    no_escape: bool = Field(description="No path avoids the region for all time")
    curve_first_exit: int | None = Field(default=None, description="First slice where Gamma leaves the section")
    uncovered_nodes: int = 0
    component_counts: list[int] = Field(default_factory=list)
    t1: float | None = None
    t2: float | None = None
    survivors: int = Field(default=0, description="Phantom nodes alive at T")
    survivors_refined: int = Field(default=0, description="Phantom nodes alive at T with dt halved")
    escape_consistent: bool = True
    grid_n: tuple[int, ...] = ()
    steps: int = 0

    @property
    def passed(self) -> bool:
        return self.curve_inside and self.covered and self.complement_connected and self.two_components and self.no_escape


def _structure(dim: int) -> np.ndarray:
    return ndimage.generate_binary_structure(dim, 1)


def centroid_curve(region: MovingRegion) -> np.ndarray:
    """Centroid of the masked nodes per slice; NaN where a section is empty."""
    points = region.grid.points()
    out = np.full((region.time.count, region.grid.dim), np.nan)
    for m, mask in enumerate(region.masks.reshape(region.time.count, -1)):
        if mask.any():
            out[m] = points[mask].mean(axis=0)
    return out


def component_counts(region: MovingRegion) -> list[int]:
    """Connected components of Omega minus the closed section, per slice."""
    counts = []
    for closed in region.closure_masks():
        _, count = ndimage.label(~closed, structure=_structure(region.grid.dim))
        counts.append(int(count))
    return counts


def phantom_survivors(masks: np.ndarray) -> int:
    """Breadth-first survival of phantom points that avoid the region.

    A phantom may relocate anywhere inside its current component of the
    complement between consecutive slices, but must be outside the mask at
    every slice. Returns the number of nodes still reachable at the last slice.
    """
    structure = _structure(masks.ndim - 1)
    alive = ~masks[0]
    for m in range(len(masks) - 1):
        labels, _ = ndimage.label(~masks[m], structure=structure)
        reached = np.unique(labels[alive & (labels > 0)])
        reach = np.isin(labels, reached[reached > 0])
        alive = reach & ~masks[m + 1]
        if not alive.any():
            return 0
    return int(alive.sum())


def _switch_times(counts: list[int], nodes: np.ndarray) -> tuple[bool, bool, float | None, float | None]:
    counts_array = np.asarray(counts)
    two = np.flatnonzero(counts_array == 2)
    if two.size == 0:
        complement_connected = bool(np.all(counts_array == 1))
        return complement_connected, False, None, None
    first, last = int(two[0]), int(two[-1])
    contiguous = last - first + 1 == two.size
    interior = first > 0 and last < len(counts) - 1
    t1 = float(nodes[first - 1]) if first > 0 else None
    t2 = float(nodes[last + 1]) if last < len(counts) - 1 else None
    outside = np.concatenate([counts_array[:first], counts_array[last + 1 :]])
    complement_connected = bool(outside.size > 0 and np.all(outside == 1))
    return complement_connected, bool(contiguous and interior), t1, t2


def check_assumption(
    flow: FlowMap,
    omega0: RegionShape,
    grid: SpatialGrid,
    time: TimeGrid,
    gamma: np.ndarray | None = None,
) -> RegionAssumptionReport:
    """Evaluate the sweep conditions for the region generated by ``flow`` from ``omega0``.

    ``gamma`` is a sampled curve of shape ``(M + 1, dim)``; by default the
    centroid curve of the rasterized sections is used. The escape test runs at
    ``dt`` and ``dt / 2`` and holds only if both runs find no survivor.
    """
    region = rasterize_region(flow, omega0, grid, time)

    curve = centroid_curve(region) if gamma is None else np.asarray(gamma, dtype=float).reshape(time.count, grid.dim)
    finite = np.all(np.isfinite(curve), axis=-1)
    inside = np.zeros(time.count, dtype=bool)
    if finite.any():
        pulled = flow.integrate(curve[finite], time.nodes[finite], 0.0)
        inside[finite] = grid.contains(curve[finite]) & omega0.contains(pulled)
    failures = np.flatnonzero(~inside)
    first_exit = int(failures[0]) if failures.size else None

    uncovered = int((~region.coverage()).sum())
    counts = component_counts(region)
    complement_connected, two_components, t1, t2 = _switch_times(counts, time.nodes)

    survivors = phantom_survivors(region.masks)
    refined = rasterize_region(flow, omega0, grid, time.refined(2))
    survivors_refined = phantom_survivors(refined.masks)
    consistent = (survivors == 0) == (survivors_refined == 0)

    report = RegionAssumptionReport(
        curve_inside=first_exit is None,
        covered=uncovered == 0,
        complement_connected=complement_connected,
        two_components=two_components,
        no_escape=survivors == 0 and survivors_refined == 0,
        curve_first_exit=first_exit,
        uncovered_nodes=uncovered,
        component_counts=counts,
        t1=t1,
        t2=t2,
        survivors=survivors,
        survivors_refined=survivors_refined,
        escape_consistent=consistent,
        grid_n=grid.n,
        steps=time.steps,
    )
    logger.debug(f"sweep check: passed={report.passed} uncovered={report.uncovered_nodes} survivors={report.survivors}")
    return report
