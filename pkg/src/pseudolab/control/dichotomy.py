"""Control cost as the penalty vanishes: bounded for observable regions, unbounded otherwise."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Literal

import numpy as np
import polars as pl
from pydantic import BaseModel, ConfigDict, Field, field_validator

from pseudolab.config import get_runtime_settings
from pseudolab.control.hum import HUMProblem, solve_null_control
from pseudolab.flow import MovingRegion
from pseudolab.grid import ScalarField
from pseudolab.pde import BBMCoefficients, Equation

logger = logging.getLogger(__name__)


class DiagnosticPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    beta: float
    region_kind: str
    cost: float
    final_norm: float
    cg_iters: int
    converged: bool


class GrowthBound(BaseModel):
    """Expected cost growth per decade of beta for one region kind."""

    model_config = ConfigDict(frozen=True)

    region_kind: str
    direction: Literal["at_most", "at_least"]
    value: float = Field(gt=0)

    @property
    def label(self) -> str:
        return f"{'<=' if self.direction == 'at_most' else '>='} {self.value:g}"

    def holds(self, growth: float) -> bool:
        """False for a NaN growth factor."""
        if np.isnan(growth):
            return False
        return growth <= self.value if self.direction == "at_most" else growth >= self.value


class DiagnosticCurve(BaseModel):
    """Cost and terminal norm per (beta, region kind)."""

    model_config = ConfigDict(frozen=True)

    equation: Equation
    betas: list[float]
    points: list[DiagnosticPoint] = Field(default_factory=list)

    @field_validator("betas")
    @classmethod
    def _decreasing(cls, value: list[float]) -> list[float]:
        if any(b >= a for a, b in zip(value, value[1:])):
            raise ValueError(f"betas must be strictly decreasing, got {value}")
        return value

    @property
    def region_kinds(self) -> list[str]:
        return list(dict.fromkeys(point.region_kind for point in self.points))

    def series(self, region_kind: str) -> list[DiagnosticPoint]:
        rows = [point for point in self.points if point.region_kind == region_kind]
        return sorted(rows, key=lambda point: -point.beta)

    def growth_factor(self, region_kind: str, decades: int = 2) -> float:
        """Cost growth per decade of beta over the last ``decades`` sweep steps.

        NaN when the series is too short or the cost vanishes.
        """
        rows = self.series(region_kind)
        if len(rows) < decades + 1:
            return float("nan")
        first, last = rows[-decades - 1], rows[-1]
        span = np.log10(first.beta / last.beta)
        if first.cost <= 0.0 or span <= 0.0:
            return float("nan")
        return float((last.cost / first.cost) ** (1.0 / span))

    def summary(self, decades: int = 2) -> dict[str, float]:
        return {kind: self.growth_factor(kind, decades) for kind in self.region_kinds}

    def summary_rows(self, bounds: list[GrowthBound] | None = None, decades: int = 2) -> list[dict[str, str | float | bool | None]]:
        """One row per region kind; kinds with a bound also say whether it holds."""
        by_kind = {bound.region_kind: bound for bound in bounds or []}
        rows: list[dict[str, str | float | bool | None]] = []
        for kind, growth in self.summary(decades).items():
            bound = by_kind.get(kind)
            rows.append(
                {
                    "equation": self.equation,
                    "region_kind": kind,
                    "growth_per_decade": growth,
                    "expected": bound.label if bound else None,
                    "meets_expected": bound.holds(growth) if bound else None,
                }
            )
        return rows

    def to_frame(self) -> pl.DataFrame:
        return pl.DataFrame(
            {
                "beta": [point.beta for point in self.points],
                "region_kind": [point.region_kind for point in self.points],
                "cost": [point.cost for point in self.points],
                "final_norm": [point.final_norm for point in self.points],
                "cg_iters": [point.cg_iters for point in self.points],
            },
            schema={"beta": pl.Float64, "region_kind": pl.Utf8, "cost": pl.Float64, "final_norm": pl.Float64, "cg_iters": pl.Int64},
        )


def dichotomy_diagnostic(
    z0: ScalarField,
    fixed: MovingRegion,
    moving: MovingRegion,
    betas: list[float],
    equation: Equation,
    *,
    coefficients: BBMCoefficients | None = None,
    extra: dict[str, MovingRegion] | None = None,
    tol: float = 1e-8,
    max_iter: int = 500,
) -> DiagnosticCurve:
    """Penalized null controls for every beta, once per region.

    ``extra`` adds further labelled regions (for example the whole domain).
    """
    regions = {"fixed": fixed, "moving": moving, **(extra or {})}
    reference = (moving.grid, moving.time)
    for kind, region in regions.items():
        if (region.grid, region.time) != reference:
            raise ValueError(f"region {kind!r} uses different grids")
    curve = DiagnosticCurve(equation=equation, betas=betas)

    cells = [(kind, beta) for kind in regions for beta in betas]

    def _run(cell: tuple[str, float]) -> DiagnosticPoint:
        kind, beta = cell
        problem = HUMProblem(equation=equation, z0=z0, region=regions[kind], beta=beta, tol=tol, max_iter=max_iter, coefficients=coefficients)
        solution = solve_null_control(problem)
        logger.info(f"{equation} {kind} beta={beta:g}: cost {solution.cost:.4e}, |z(T)| {solution.final_norm:.3e}, {solution.cg_iterations} CG iterations")
        return DiagnosticPoint(
            beta=beta,
            region_kind=kind,
            cost=solution.cost,
            final_norm=solution.final_norm,
            cg_iters=solution.cg_iterations,
            converged=solution.converged,
        )

    workers = max(1, min(get_runtime_settings().threads, len(cells)))
    with ThreadPoolExecutor(max_workers=workers) as executor:
        points = list(executor.map(_run, cells))
    return curve.model_copy(update={"points": points})
