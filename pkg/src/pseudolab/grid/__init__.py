"""Tensor grids, discrete operators, elliptic solves and quadrature."""

from pseudolab.grid.fields import ScalarField, SpaceTimeField, SpatialGrid, TimeGrid
from pseudolab.grid.operators import (
    BoundaryTrace,
    ShiftedLaplacianSolver,
    apply_laplacian,
    boundary_lift,
    boundary_points,
    difference_matrices,
    divergence,
    gradient,
    gradient_values,
    helmholtz_matrix,
    helmholtz_solve,
    helmholtz_solve_dense,
    laplacian_matrix,
    laplacian_values,
    poisson_solve,
    shifted_solver,
)
from pseudolab.grid.quadrature import inner_product, integrate, integrate_values, time_weights

__all__ = [
    "BoundaryTrace",
    "ScalarField",
    "ShiftedLaplacianSolver",
    "SpaceTimeField",
    "SpatialGrid",
    "TimeGrid",
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
    "inner_product",
    "integrate",
    "integrate_values",
    "laplacian_matrix",
    "laplacian_values",
    "poisson_solve",
    "shifted_solver",
    "time_weights",
]
