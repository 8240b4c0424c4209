"""Finite-difference operators and elliptic solves on a SpatialGrid.

All operators act on interior values in C order and assume homogeneous
Dirichlet data unless a :class:`BoundaryTrace` is passed. Arrays may carry
leading axes (typically time); the spatial axes are always the trailing ones.
"""

from __future__ import annotations

import logging
import threading
from collections.abc import Callable
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from pydantic import BaseModel, ConfigDict

from pseudolab.exceptions import SolverDivergedError
from pseudolab.grid.fields import ScalarField, SpatialGrid

logger = logging.getLogger(__name__)

__all__ = [
    "BoundaryTrace",
    "ShiftedLaplacianSolver",
    "apply_laplacian",
    "boundary_lift",
    "boundary_points",
    "difference_matrices",
    "divergence",
    "gradient",
    "gradient_values",
    "helmholtz_matrix",
    "helmholtz_solve",
    "helmholtz_solve_dense",
    "laplacian_matrix",
    "laplacian_values",
    "poisson_solve",
    "shifted_solver",
]

HELMHOLTZ_RTOL = 1e-10


def _second_difference(n: int, h: float) -> sp.csr_matrix:
    return sp.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(n, n), format="csr") / h**2


def _centered_difference(n: int, h: float) -> sp.csr_matrix:
    return sp.diags([-1.0, 1.0], [-1, 1], shape=(n, n), format="csr") / (2.0 * h)


def _embed_axis(grid: SpatialGrid, axis: int, block: sp.spmatrix) -> sp.csr_matrix:
    """Lift a 1D operator along ``axis`` to the full tensor grid."""
    factors = [sp.identity(count, format="csr") for count in grid.n]
    factors[axis] = block
    out = factors[0]
    for factor in factors[1:]:
        out = sp.kron(out, factor, format="csr")
    return out.tocsr()


@lru_cache(maxsize=64)
def laplacian_matrix(grid: SpatialGrid) -> sp.csr_matrix:
    """Dirichlet Laplacian (3-point in 1D, 5-point in 2D) as a sparse matrix."""
    out = sp.csr_matrix((grid.size, grid.size))
    for axis, (count, h) in enumerate(zip(grid.n, grid.spacing)):
        out = out + _embed_axis(grid, axis, _second_difference(count, h))
    return out.tocsr()


@lru_cache(maxsize=64)
def helmholtz_matrix(grid: SpatialGrid) -> sp.csr_matrix:
    """``I - Delta_h``."""
    return (sp.identity(grid.size, format="csr") - laplacian_matrix(grid)).tocsr()


@lru_cache(maxsize=64)
def difference_matrices(grid: SpatialGrid) -> tuple[sp.csr_matrix, ...]:
    """Centered first differences per axis; each matrix is skew-symmetric."""
    return tuple(_embed_axis(grid, axis, _centered_difference(count, h)) for axis, (count, h) in enumerate(zip(grid.n, grid.spacing)))


def _apply_flat(matrix: sp.spmatrix, values: np.ndarray, grid: SpatialGrid) -> np.ndarray:
    lead = values.shape[: values.ndim - grid.dim]
    flat = values.reshape(-1, grid.size)
    out = (matrix @ flat.T).T
    return np.asarray(out).reshape((*lead, *grid.shape))


def laplacian_values(values: np.ndarray, grid: SpatialGrid) -> np.ndarray:
    """Apply Delta_h to an array whose trailing axes are ``grid.shape``."""
    return _apply_flat(laplacian_matrix(grid), np.asarray(values), grid)


def apply_laplacian(f: ScalarField) -> ScalarField:
    return f.with_values(laplacian_values(f.values, f.grid))


def gradient_values(values: np.ndarray, grid: SpatialGrid) -> np.ndarray:
    """Centered gradient; returns shape ``(*values.shape, dim)``."""
    values = np.asarray(values)
    return np.stack([_apply_flat(matrix, values, grid) for matrix in difference_matrices(grid)], axis=-1)


def gradient(f: ScalarField) -> np.ndarray:
    return gradient_values(f.values, f.grid)


def divergence(components: np.ndarray, grid: SpatialGrid) -> np.ndarray:
    """Centered divergence of a vector field of shape ``(..., *grid.shape, dim)``.

    This is minus the transpose of :func:`gradient_values`.
    """
    components = np.asarray(components)
    if components.shape[-1] != grid.dim:
        raise ValueError(f"expected {grid.dim} components, got {components.shape[-1]}")
    return sum(_apply_flat(matrix, components[..., axis], grid) for axis, matrix in enumerate(difference_matrices(grid)))


def boundary_points(grid: SpatialGrid) -> list[tuple[np.ndarray, np.ndarray]]:
    """Boundary nodes adjacent to the interior, per axis as (low face, high face).

    Each face is an array of shape ``(face_size, dim)``; corners are omitted
    because the stencils never reach them.
    """
    axes = grid.axes()
    faces = []
    for axis, (lower, upper) in enumerate(grid.bounds):
        pair = []
        for value in (lower, upper):
            coords = list(axes)
            coords[axis] = np.array([value])
            mesh = np.stack(np.meshgrid(*coords, indexing="ij"), axis=-1)
            pair.append(mesh.reshape(-1, grid.dim))
        faces.append((pair[0], pair[1]))
    return faces


class BoundaryTrace(BaseModel):
    """Dirichlet data on each face of the box.

    ``faces[axis]`` holds the low and high face values, each of shape
    ``(*lead, face_size)`` where ``lead`` is an optional stack of leading
    axes (for example one face value per time node).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: SpatialGrid
    faces: tuple[tuple[np.ndarray, np.ndarray], ...]

    @classmethod
    def zeros(cls, grid: SpatialGrid) -> BoundaryTrace:
        return cls.from_function(grid, lambda points: np.zeros(len(points)))

    @classmethod
    def from_function(cls, grid: SpatialGrid, fn: Callable[[np.ndarray], np.ndarray]) -> BoundaryTrace:
        """Sample ``fn`` on the boundary; ``fn`` returns values with points on its last axis."""
        faces = tuple((np.asarray(fn(low)), np.asarray(fn(high))) for low, high in boundary_points(grid))
        return cls(grid=grid, faces=faces)

    @classmethod
    def from_values(cls, grid: SpatialGrid, faces: list[tuple[np.ndarray, np.ndarray]]) -> BoundaryTrace:
        return cls(grid=grid, faces=tuple((np.asarray(low), np.asarray(high)) for low, high in faces))

    def scaled(self, factor: complex) -> BoundaryTrace:
        return BoundaryTrace(grid=self.grid, faces=tuple((factor * low, factor * high) for low, high in self.faces))

    def max_abs(self) -> float:
        return float(max(max(np.max(np.abs(low)), np.max(np.abs(high))) for low, high in self.faces))


def boundary_lift(trace: BoundaryTrace) -> np.ndarray:
    """Stencil contribution of the boundary data to Delta_h.

    With boundary values ``g``, the full Laplacian equals
    ``laplacian_values(u) + boundary_lift(trace)``.
    """
    grid = trace.grid
    lead = np.asarray(trace.faces[0][0]).shape[:-1]
    dtype = np.result_type(*(face for pair in trace.faces for face in pair), float)
    out = np.zeros((*lead, *grid.shape), dtype=dtype)
    for axis, ((low, high), h) in enumerate(zip(trace.faces, grid.spacing)):
        face_shape = tuple(count for other, count in enumerate(grid.n) if other != axis)
        first = [slice(None)] * grid.dim
        last = [slice(None)] * grid.dim
        first[axis] = 0
        last[axis] = -1
        out[(Ellipsis, *first)] += np.asarray(low).reshape((*lead, *face_shape)) / h**2
        out[(Ellipsis, *last)] += np.asarray(high).reshape((*lead, *face_shape)) / h**2
    return out


def _split_complex(solve: Callable[[np.ndarray], np.ndarray], rhs: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(rhs):
        return solve(np.ascontiguousarray(rhs.real)) + 1j * solve(np.ascontiguousarray(rhs.imag))
    return solve(np.asarray(rhs, dtype=float))


def helmholtz_solve(grid: SpatialGrid, rhs: ScalarField, boundary: BoundaryTrace | None = None, *, maxiter: int | None = None) -> ScalarField:
    """Solve ``(I - Delta_h) u = rhs`` with Dirichlet data by Jacobi-preconditioned CG.

    Raises:
        SolverDivergedError: If the relative residual stays above 1e-10.
    """
    matrix = helmholtz_matrix(grid)
    b = rhs.flat
    if boundary is not None:
        b = b + boundary_lift(boundary).reshape(-1)
    preconditioner = sp.diags(1.0 / matrix.diagonal())
    cap = maxiter if maxiter is not None else 10 * grid.size

    def _cg(part: np.ndarray) -> np.ndarray:
        norm = np.linalg.norm(part)
        if norm == 0.0:
            return np.zeros_like(part)
        solution, info = spla.cg(matrix, part, rtol=1e-12, atol=0.0, maxiter=cap, M=preconditioner)
        residual = np.linalg.norm(matrix @ solution - part) / norm
        logger.debug(f"helmholtz cg info={info} residual={residual:.3e}")
        if residual > HELMHOLTZ_RTOL:
            raise SolverDivergedError(f"CG stagnated at relative residual {residual:.3e} after at most {cap} iterations")
        return solution

    return ScalarField(grid=grid, values=_split_complex(_cg, b))


def helmholtz_solve_dense(grid: SpatialGrid, rhs: ScalarField, boundary: BoundaryTrace | None = None) -> ScalarField:
    """Dense direct solve of the same system; a reference for small grids."""
    b = rhs.flat
    if boundary is not None:
        b = b + boundary_lift(boundary).reshape(-1)
    return ScalarField(grid=grid, values=np.linalg.solve(helmholtz_matrix(grid).toarray(), b))


class ShiftedLaplacianSolver:
    """Sparse LU of ``a I - b Delta_h``, reused across right-hand sides."""

    def __init__(self, grid: SpatialGrid, a: float, b: float):
        self.grid = grid
        self.a = a
        self.b = b
        operator = a * sp.identity(grid.size, format="csc") - b * laplacian_matrix(grid)
        self._lu = spla.splu(operator.tocsc())
        self._lock = threading.Lock()

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve for flat right-hand sides of shape ``(size,)`` or ``(size, k)``."""

        def _solve(part: np.ndarray) -> np.ndarray:
            with self._lock:
                return self._lu.solve(part)

        return _split_complex(_solve, np.asarray(rhs))

    def solve_values(self, values: np.ndarray) -> np.ndarray:
        """Solve slice by slice for values with trailing axes ``grid.shape``."""
        values = np.asarray(values)
        lead = values.shape[: values.ndim - self.grid.dim]
        flat = values.reshape(-1, self.grid.size).T
        return self.solve(flat).T.reshape((*lead, *self.grid.shape))


@lru_cache(maxsize=128)
def shifted_solver(grid: SpatialGrid, a: float, b: float) -> ShiftedLaplacianSolver:
    return ShiftedLaplacianSolver(grid, a, b)


def poisson_solve(grid: SpatialGrid, rhs: ScalarField, boundary: BoundaryTrace | None = None) -> ScalarField:
    """Solve ``-Delta_h u = rhs`` with Dirichlet data."""
    b = rhs.flat
    if boundary is not None:
        b = b + boundary_lift(boundary).reshape(-1)
    return ScalarField(grid=grid, values=shifted_solver(grid, 0.0, 1.0).solve(b))
