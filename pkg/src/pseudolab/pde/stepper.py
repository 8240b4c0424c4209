"""Crank-Nicolson time stepping for the decomposed pseudo-parabolic systems.

Both equations are written as ``z_t = N(t) z + f`` with a bounded operator N
built from ``K = (I - Delta_h)^-1``. One step reads

    B_{m+1} z^{m+1} = C_m z^m + (dt / 2) (f^m + f^{m+1}),
    B_{m+1} = I - (dt / 2) N^{m+1},   C_m = I + (dt / 2) N^m,

and the adjoint sweep applies the exact transposes,

    mu^{m+1} = B_{m+1}^-T psi^{m+1},   psi^m = C_m^T mu^{m+1},

so that ``<z^M, psi^M> = <z^0, psi^0> + sum_k w_k <f^k, obs^k>`` holds to
rounding, with trapezoid weights w_k and the observed adjoint
``obs^0 = mu^1``, ``obs^k = (mu^k + mu^{k+1}) / 2``, ``obs^M = mu^M``.
"""

from __future__ import annotations

import logging
import threading
from abc import ABC, abstractmethod
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from pseudolab.grid import SpatialGrid, TimeGrid, difference_matrices, helmholtz_matrix, shifted_solver
from pseudolab.pde.coefficients import BBMCoefficients

logger = logging.getLogger(__name__)


def _lu_solve(lu: spla.SuperLU, rhs: np.ndarray, trans: str = "N") -> np.ndarray:
    if np.iscomplexobj(rhs):
        return lu.solve(np.ascontiguousarray(rhs.real), trans=trans) + 1j * lu.solve(np.ascontiguousarray(rhs.imag), trans=trans)
    return lu.solve(np.asarray(rhs, dtype=float), trans=trans)


class PseudoParabolicStepper(ABC):
    """Generic engine; subclasses supply B, C and their transposes."""

    equation: str = ""

    def __init__(self, grid: SpatialGrid, time: TimeGrid):
        self.grid = grid
        self.time = time
        self.dt = time.dt
        self._kernel = shifted_solver(grid, 1.0, 1.0)
        self._helmholtz = helmholtz_matrix(grid)

    def K(self, x: np.ndarray) -> np.ndarray:
        """``(I - Delta_h)^-1 x``."""
        return self._kernel.solve(x)

    def helmholtz(self, x: np.ndarray) -> np.ndarray:
        """``(I - Delta_h) x``."""
        return self._helmholtz @ x

    @abstractmethod
    def solve_B(self, rhs: np.ndarray, m: int) -> np.ndarray: ...

    @abstractmethod
    def apply_B(self, z: np.ndarray, m: int) -> np.ndarray: ...

    @abstractmethod
    def apply_C(self, z: np.ndarray, m: int) -> np.ndarray: ...

    @abstractmethod
    def solve_BT(self, psi: np.ndarray, m: int) -> np.ndarray: ...

    @abstractmethod
    def apply_BT(self, x: np.ndarray, m: int) -> np.ndarray: ...

    @abstractmethod
    def apply_CT(self, mu: np.ndarray, m: int) -> np.ndarray: ...

    @abstractmethod
    def solve_CT(self, rhs: np.ndarray, m: int) -> np.ndarray: ...

    @abstractmethod
    def phi(self, psi: np.ndarray, m: int) -> np.ndarray:
        """The elliptic companion of the adjoint state at slice ``m``."""

    def forward(self, z0: np.ndarray, source: np.ndarray | None = None, record_residuals: bool = False) -> tuple[np.ndarray, list[float]]:
        """March ``z`` from ``z0``; ``source`` has shape ``(M + 1, size)``."""
        M = self.time.steps
        dtype = np.result_type(z0, source if source is not None else 0.0, float)
        z = np.zeros((M + 1, self.grid.size), dtype=dtype)
        z[0] = z0
        residuals: list[float] = []
        for m in range(M):
            rhs = self.apply_C(z[m], m)
            if source is not None:
                rhs = rhs + 0.5 * self.dt * (source[m] + source[m + 1])
            z[m + 1] = self.solve_B(rhs, m + 1)
            if record_residuals:
                scale = max(float(np.linalg.norm(rhs)), np.finfo(float).tiny)
                residuals.append(float(np.linalg.norm(self.apply_B(z[m + 1], m + 1) - rhs)) / scale)
        return z, residuals

    def backward(self, psi_T: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Exact transpose of :meth:`forward`; returns ``(psi, mu)``, ``mu[0]`` unused."""
        M = self.time.steps
        dtype = np.result_type(psi_T, float)
        psi = np.zeros((M + 1, self.grid.size), dtype=dtype)
        mu = np.zeros_like(psi)
        psi[M] = psi_T
        for m in range(M - 1, -1, -1):
            mu[m + 1] = self.solve_BT(psi[m + 1], m + 1)
            psi[m] = self.apply_CT(mu[m + 1], m)
        return psi, mu

    @staticmethod
    def observed(mu: np.ndarray) -> np.ndarray:
        """The adjoint as seen by the trapezoid pairing with a source."""
        obs = np.empty_like(mu)
        obs[0] = mu[1]
        obs[-1] = mu[-1]
        obs[1:-1] = 0.5 * (mu[1:-1] + mu[2:])
        return obs

    def phi_all(self, psi: np.ndarray) -> np.ndarray:
        return np.stack([self.phi(psi[m], m) for m in range(self.time.count)])

    def correction(self, defect: np.ndarray) -> np.ndarray:
        """Forward-in-time solve of ``c^{m+1} = B^T C^-T (c^m + d^m)`` from ``c^0 = 0``.

        Adding ``c`` to a field whose one-step adjoint defects are ``d`` yields an
        exact discrete adjoint solution with the same initial slice.
        """
        M = self.time.steps
        c = np.zeros((M + 1, self.grid.size), dtype=np.result_type(defect, float))
        for m in range(M):
            c[m + 1] = self.apply_BT(self.solve_CT(c[m] + defect[m], m), m + 1)
        return c

    def adjoint_defects(self, psi: np.ndarray) -> np.ndarray:
        """``d^m = psi^m - C_m^T B_{m+1}^-T psi^{m+1}`` for m = 0..M-1."""
        return np.stack([psi[m] - self.apply_CT(self.solve_BT(psi[m + 1], m + 1), m) for m in range(self.time.steps)])


class BZKStepper(PseudoParabolicStepper):
    """N = K - I, symmetric and time independent."""

    equation = "bzk"

    def __init__(self, grid: SpatialGrid, time: TimeGrid):
        super().__init__(grid, time)
        half = 0.5 * self.dt
        self._B = shifted_solver(grid, 1.0, 1.0 + half)
        self._C = shifted_solver(grid, 1.0, 1.0 - half)

    def solve_B(self, rhs: np.ndarray, m: int) -> np.ndarray:
        # B = K (I - (1 + dt/2) Delta_h)
        return self._B.solve(self.helmholtz(rhs))

    def apply_B(self, z: np.ndarray, m: int) -> np.ndarray:
        return (1.0 + 0.5 * self.dt) * z - 0.5 * self.dt * self.K(z)

    def apply_C(self, z: np.ndarray, m: int) -> np.ndarray:
        return (1.0 - 0.5 * self.dt) * z + 0.5 * self.dt * self.K(z)

    def solve_BT(self, psi: np.ndarray, m: int) -> np.ndarray:
        return self.solve_B(psi, m)

    def apply_BT(self, x: np.ndarray, m: int) -> np.ndarray:
        return self.apply_B(x, m)

    def apply_CT(self, mu: np.ndarray, m: int) -> np.ndarray:
        return self.apply_C(mu, m)

    def solve_CT(self, rhs: np.ndarray, m: int) -> np.ndarray:
        # C = K (I - (1 - dt/2) Delta_h)
        return self._C.solve(self.helmholtz(rhs))

    def phi(self, psi: np.ndarray, m: int) -> np.ndarray:
        return self.K(psi)


class BBMStepper(PseudoParabolicStepper):
    """N(t) = -D_A(t) K with D_A = sum_a D_a diag(A_a), the centered divergence of A y."""

    equation = "bbm"

    def __init__(self, grid: SpatialGrid, time: TimeGrid, coefficients: BBMCoefficients):
        super().__init__(grid, time)
        self.coefficients = coefficients
        samples = np.asarray(coefficients.sample(grid, time))
        differences = difference_matrices(grid)
        slices = [0] if coefficients.stationary else range(time.count)
        self._advection: list[sp.csr_matrix] = []
        for m in slices:
            flat = samples[m].reshape(grid.size, grid.dim)
            self._advection.append(sum((differences[a] @ sp.diags(flat[:, a])).tocsr() for a in range(grid.dim)))
        self._G: dict[int, spla.SuperLU] = {}
        self._H: dict[int, spla.SuperLU] = {}
        self._lock = threading.Lock()

    def advection(self, m: int) -> sp.csr_matrix:
        return self._advection[0 if self.coefficients.stationary else m]

    def _factor(self, cache: dict[int, spla.SuperLU], m: int, sign: float, transpose: bool) -> spla.SuperLU:
        key = 0 if self.coefficients.stationary else m
        with self._lock:
            lu = cache.get(key)
            if lu is None:
                D = self.advection(m)
                D = D.T if transpose else D
                lu = spla.splu((self._helmholtz + sign * 0.5 * self.dt * D).tocsc())
                cache[key] = lu
            return lu

    def solve_B(self, rhs: np.ndarray, m: int) -> np.ndarray:
        # B = G K with G = (I - Delta_h) + (dt/2) D_A
        y = _lu_solve(self._factor(self._G, m, 1.0, False), rhs)
        return rhs - 0.5 * self.dt * (self.advection(m) @ y)

    def apply_B(self, z: np.ndarray, m: int) -> np.ndarray:
        return z + 0.5 * self.dt * (self.advection(m) @ self.K(z))

    def apply_C(self, z: np.ndarray, m: int) -> np.ndarray:
        return z - 0.5 * self.dt * (self.advection(m) @ self.K(z))

    def solve_BT(self, psi: np.ndarray, m: int) -> np.ndarray:
        return _lu_solve(self._factor(self._G, m, 1.0, False), self.helmholtz(psi), trans="T")

    def apply_BT(self, x: np.ndarray, m: int) -> np.ndarray:
        return x + 0.5 * self.dt * self.K(self.advection(m).T @ x)

    def apply_CT(self, mu: np.ndarray, m: int) -> np.ndarray:
        return mu - 0.5 * self.dt * self.K(self.advection(m).T @ mu)

    def solve_CT(self, rhs: np.ndarray, m: int) -> np.ndarray:
        # C^T = K H with H = (I - Delta_h) - (dt/2) D_A^T
        return _lu_solve(self._factor(self._H, m, -1.0, True), self.helmholtz(rhs))

    def phi(self, psi: np.ndarray, m: int) -> np.ndarray:
        # (I - Delta_h) phi = A . grad psi = -D_A^T psi
        return -self.K(self.advection(m).T @ psi)


@lru_cache(maxsize=32)
def bzk_stepper(grid: SpatialGrid, time: TimeGrid) -> BZKStepper:
    return BZKStepper(grid, time)


@lru_cache(maxsize=32)
def bbm_stepper(grid: SpatialGrid, time: TimeGrid, coefficients: BBMCoefficients) -> BBMStepper:
    return BBMStepper(grid, time, coefficients)
