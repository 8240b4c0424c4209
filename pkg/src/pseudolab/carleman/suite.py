"""Random-function suites turning the Carleman constants into measured ratios.

Each suite draws seeded smooth test functions, evaluates the ratio
lhs / rhs at a base parameter and at twice that value, and records whether the
largest ratio stays within ``STABILITY_FACTOR`` of its base value.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import Literal, TypeVar

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from pseudolab.carleman.inequalities import eval_elliptic_carleman, eval_h1_carleman, eval_ode_carleman, global_sides
from pseudolab.config import get_runtime_settings
from pseudolab.flow import MovingRegion
from pseudolab.grid import ScalarField, SpaceTimeField, SpatialGrid, TimeGrid
from pseudolab.pde import BBMCoefficients, Equation, solve_adjoint
from pseudolab.weights import WeightSet

logger = logging.getLogger(__name__)

STABILITY_FACTOR = 1.1
DEFAULT_MODES = 4

T = TypeVar("T")
R = TypeVar("R")


def random_profile(grid: SpatialGrid, rng: np.random.Generator, modes: int = DEFAULT_MODES) -> np.ndarray:
    """Sine series with zero trace; coefficients decay like 1 / |k|^2."""
    mesh = grid.mesh()
    out = np.zeros(grid.shape)
    for ks in itertools.product(range(1, modes + 1), repeat=grid.dim):
        term = np.ones(grid.shape)
        for axis, k in enumerate(ks):
            lower, upper = grid.bounds[axis]
            term = term * np.sin(k * np.pi * (mesh[..., axis] - lower) / (upper - lower))
        out += rng.standard_normal() / sum(k * k for k in ks) * term
    return out


def random_space_time(grid: SpatialGrid, time: TimeGrid, rng: np.random.Generator, modes: int = DEFAULT_MODES) -> np.ndarray:
    """Sum of cosines in time times independent random profiles."""
    shape = (-1,) + (1,) * grid.dim
    out = np.zeros((time.count, *grid.shape))
    for j in range(modes):
        out += np.cos(j * np.pi * time.nodes / time.horizon).reshape(shape) * random_profile(grid, rng, modes)
    return out


def horizon_scaled_s(s0: float, horizon: float) -> float:
    """s0 (T + T^2), the lower bound on s required by the global estimates."""
    return s0 * (horizon + horizon**2)


def _finite_max(values: list[float]) -> float:
    finite = [value for value in values if np.isfinite(value)]
    return max(finite) if finite else float("nan")


class SuiteResult(BaseModel):
    """Ratios of one inequality over a random suite at a base parameter and its double."""

    model_config = ConfigDict(frozen=True)

    name: str
    parameter: Literal["s", "tau"]
    base: float
    lam: float
    ratios_base: list[float]
    ratios_doubled: list[float]
    tolerance: float = Field(default=STABILITY_FACTOR, gt=0)

    @property
    def max_base(self) -> float:
        return _finite_max(self.ratios_base)

    @property
    def max_doubled(self) -> float:
        return _finite_max(self.ratios_doubled)

    @property
    def stable(self) -> bool:
        """False when either maximum is undefined."""
        return bool(self.max_doubled <= self.tolerance * self.max_base)

    def row(self) -> dict[str, float | str | bool]:
        return {
            "inequality": self.name,
            "parameter": self.parameter,
            "base": self.base,
            "lam": self.lam,
            "samples": len(self.ratios_base),
            "max_ratio_base": self.max_base,
            "max_ratio_doubled": self.max_doubled,
            "stable": self.stable,
        }


def _map(fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
    workers = max(1, min(get_runtime_settings().threads, len(items)))
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))


def _result(name: str, parameter: Literal["s", "tau"], base: float, lam: float, pairs: list[tuple[float, float]]) -> SuiteResult:
    result = SuiteResult(
        name=name,
        parameter=parameter,
        base=base,
        lam=lam,
        ratios_base=[pair[0] for pair in pairs],
        ratios_doubled=[pair[1] for pair in pairs],
    )
    logger.info(f"{name} suite: max ratio {result.max_base:.4e} at {parameter}={base:g}, {result.max_doubled:.4e} at {2 * base:g}")
    return result


def _interior_slices(time: TimeGrid, rng: np.random.Generator, samples: int) -> list[int]:
    return [int(m) for m in rng.integers(1, time.steps, size=samples)]


def ode_suite(weights: WeightSet, region: MovingRegion, samples: int = 20, seed: int = 0) -> SuiteResult:
    """Time-derivative estimate at s and 2 s on random space-time q."""
    grid, time = weights.eta.grid, weights.eta.time
    rng = np.random.default_rng(seed)
    draws = [SpaceTimeField(grid=grid, time=time, values=random_space_time(grid, time, rng)) for _ in range(samples)]
    doubled = weights.with_s(2.0 * weights.s)
    pairs = _map(lambda q: (eval_ode_carleman(q, weights, region).ratio, eval_ode_carleman(q, doubled, region).ratio), draws)
    return _result("ode", "s", weights.s, weights.lam, pairs)


def elliptic_suite(weights: WeightSet, region: MovingRegion, tau0: float, samples: int = 20, seed: int = 0) -> SuiteResult:
    """Elliptic estimate at tau0 and 2 tau0 on random zero-trace z at random slices."""
    grid, time = weights.eta.grid, weights.eta.time
    rng = np.random.default_rng(seed)
    draws = [ScalarField(grid=grid, values=random_profile(grid, rng)) for _ in range(samples)]
    slices = _interior_slices(time, rng, samples)

    def _pair(item: tuple[ScalarField, int]) -> tuple[float, float]:
        z, m = item
        return (
            eval_elliptic_carleman(z, m, weights, tau0, region).ratio,
            eval_elliptic_carleman(z, m, weights, 2.0 * tau0, region).ratio,
        )

    return _result("elliptic", "tau", tau0, weights.lam, _map(_pair, list(zip(draws, slices))))


def h1_suite(weights: WeightSet, region: MovingRegion, tau0: float, samples: int = 20, seed: int = 0) -> SuiteResult:
    """H^-1 source estimate at tau0 and 2 tau0 on random (g, G)."""
    grid, time = weights.eta.grid, weights.eta.time
    rng = np.random.default_rng(seed)
    draws = []
    for _ in range(samples):
        g = ScalarField(grid=grid, values=random_profile(grid, rng))
        G = np.stack([random_profile(grid, rng) for _ in range(grid.dim)], axis=-1)
        draws.append((g, G))
    slices = _interior_slices(time, rng, samples)

    def _pair(item: tuple[tuple[ScalarField, np.ndarray], int]) -> tuple[float, float]:
        (g, G), m = item
        return (
            eval_h1_carleman(g, G, m, weights, tau0, region).ratio,
            eval_h1_carleman(g, G, m, weights, 2.0 * tau0, region).ratio,
        )

    return _result("h1", "tau", tau0, weights.lam, _map(_pair, list(zip(draws, slices))))


def global_suite(
    weights: WeightSet,
    region: MovingRegion,
    equation: Equation,
    coefficients: BBMCoefficients | None = None,
    samples: int = 20,
    seed: int = 0,
) -> SuiteResult:
    """Global estimate at s and 2 s; one adjoint solve per random terminal datum."""
    grid, time = weights.eta.grid, weights.eta.time
    rng = np.random.default_rng(seed)
    draws = [ScalarField(grid=grid, values=random_profile(grid, rng)) for _ in range(samples)]
    doubled = weights.with_s(2.0 * weights.s)

    def _pair(psi_T: ScalarField) -> tuple[float, float]:
        adjoint = solve_adjoint(equation, psi_T, time, coefficients)
        return global_sides(adjoint, weights, region, equation).ratio, global_sides(adjoint, doubled, region, equation).ratio

    return _result(f"global_{equation}", "s", weights.s, weights.lam, _map(_pair, draws))


def run_carleman_suites(
    weights: WeightSet,
    omega2: MovingRegion,
    omega: MovingRegion,
    tau0: float,
    *,
    global_weights: WeightSet | None = None,
    coefficients: BBMCoefficients | None = None,
    samples: int = 20,
    seed: int = 0,
) -> list[SuiteResult]:
    """Every suite with independent seeded streams.

    ``global_weights`` (default ``weights``) carries the s used for the
    global estimates; the BBM estimate runs only with ``coefficients``.
    """
    global_weights = weights if global_weights is None else global_weights
    results = [
        ode_suite(weights, omega2, samples, seed),
        elliptic_suite(weights, omega2, tau0, samples, seed + 1),
        h1_suite(weights, omega2, tau0, samples, seed + 2),
        global_suite(global_weights, omega, "bzk", None, samples, seed + 3),
    ]
    if coefficients is not None:
        results.append(global_suite(global_weights, omega, "bbm", coefficients, samples, seed + 4))
    unstable = [result.name for result in results if not result.stable]
    if unstable:
        logger.warning(f"suites above the stability factor {STABILITY_FACTOR}: {', '.join(unstable)}")
    return results
