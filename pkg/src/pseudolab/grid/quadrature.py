"""Quadrature on space-time grids: midpoint in space, trapezoid in time."""

from __future__ import annotations

from typing import Any

import numpy as np

from pseudolab.grid.fields import ScalarField, SpaceTimeField, SpatialGrid, TimeGrid

__all__ = ["inner_product", "integrate", "integrate_values", "time_weights"]


def time_weights(time: TimeGrid) -> np.ndarray:
    return time.trapezoid_weights()


def _as_array(value: Any) -> np.ndarray | None:
    if value is None:
        return None
    if isinstance(value, (ScalarField, SpaceTimeField)):
        return value.values
    # Moving regions expose their per-slice masks
    masks = getattr(value, "masks", None)
    if masks is not None:
        return np.asarray(masks)
    return np.asarray(value)


def _check_broadcast(name: str, array: np.ndarray | None, shape: tuple[int, ...]) -> None:
    if array is None:
        return
    try:
        broadcast = np.broadcast_shapes(array.shape, shape)
    except ValueError:
        broadcast = None
    if broadcast != shape:
        raise ValueError(f"shape mismatch: {name} has shape {array.shape}, field has shape {shape}")


def integrate_values(
    values: np.ndarray,
    grid: SpatialGrid,
    time: TimeGrid | None = None,
    weight: np.ndarray | None = None,
    mask: np.ndarray | None = None,
) -> float:
    """Integral of ``|values|^2 * weight`` over ``mask``.

    With ``time`` given, ``values`` carries a leading time axis of length M + 1.
    """
    values = np.asarray(values)
    shape = grid.shape if time is None else (time.count, *grid.shape)
    if values.shape != shape:
        raise ValueError(f"shape mismatch: values have shape {values.shape}, expected {shape}")
    _check_broadcast("weight", weight, shape)
    _check_broadcast("mask", mask, shape)

    density = np.abs(values) ** 2
    if weight is not None:
        density = density * weight
    if mask is not None:
        density = np.where(mask, density, 0.0)
    spatial_axes = tuple(range(density.ndim - grid.dim, density.ndim))
    per_slice = density.sum(axis=spatial_axes) * grid.cell_volume
    if time is None:
        return float(per_slice)
    return float(np.dot(time_weights(time), per_slice))


def integrate(f: ScalarField | SpaceTimeField, weight: Any = None, mask: Any = None) -> float:
    """Quadrature of ``|f|^2 * weight`` over ``mask``.

    ``weight`` may be a field or an array; ``mask`` may be a boolean array or
    a moving region (its time-indexed masks are used).

    Raises:
        ValueError: If weight or mask cannot be matched to the field shape.
    """
    time = f.time if isinstance(f, SpaceTimeField) else None
    return integrate_values(f.values, f.grid, time, _as_array(weight), _as_array(mask))


def inner_product(f: ScalarField | SpaceTimeField, g: ScalarField | SpaceTimeField) -> complex | float:
    """Hermitian pairing ``sum f * conj(g)``, trapezoid-weighted in time for space-time fields."""
    if f.values.shape != g.values.shape:
        raise ValueError(f"shape mismatch: {f.values.shape} vs {g.values.shape}")
    product = f.values * np.conj(g.values)
    if isinstance(f, SpaceTimeField):
        spatial = product.reshape(f.time.count, -1).sum(axis=1)
        total = np.dot(time_weights(f.time), spatial) * f.grid.cell_volume
    else:
        total = product.sum() * f.grid.cell_volume
    if np.iscomplexobj(total):
        return complex(total)
    return float(total)
