"""Configuration and environment handling for pseudolab."""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field, field_validator, model_validator

from pseudolab.flow import BoxRegion, SweepConfig, VelocitySpec
from pseudolab.grid import SpatialGrid, TimeGrid
from pseudolab.weights import EtaProfile

__all__ = [
    "FAMILIES",
    "BeamConfig",
    "CarlemanConfig",
    "ExperimentConfig",
    "GridConfig",
    "HUMConfig",
    "RegionConfig",
    "RuntimeSettings",
    "TimeConfig",
    "WeightsConfig",
    "get_runtime_settings",
]

FAMILIES = ("beam-bzk", "beam-bbm", "hum", "dichotomy", "carleman", "flow-check", "weights-check")

Family = Literal["beam-bzk", "beam-bbm", "hum", "dichotomy", "carleman", "flow-check", "weights-check"]


class RuntimeSettings(BaseModel):
    """Process-level settings read from the environment."""

    threads: int = Field(
        default=os.cpu_count() or 1,
        ge=1,
        description="Maximum number of worker threads",
    )

    log_level: str = Field(
        default="INFO",
        description="Level of the package logger",
    )

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        value = value.upper()
        if not isinstance(logging.getLevelName(value), int):
            raise ValueError(f"unknown log level {value!r}")
        return value

    @classmethod
    def from_env(cls) -> RuntimeSettings:
        """Create RuntimeSettings from environment variables.

        Environment variables:
        - LAB_THREADS: Worker cap for sweeps and experiment families (default: CPU count)
        - LAB_LOG_LEVEL: Package log level (default: INFO)
        """
        return cls(
            threads=max(1, int(os.environ.get("LAB_THREADS", cls.model_fields["threads"].default))),
            log_level=os.environ.get("LAB_LOG_LEVEL", cls.model_fields["log_level"].default),
        )


# Global runtime settings instance
_runtime_settings: RuntimeSettings | None = None


def get_runtime_settings() -> RuntimeSettings:
    """Get runtime settings.

    Returns cached instance if already initialized.
    """
    global _runtime_settings
    if _runtime_settings is None:
        _runtime_settings = RuntimeSettings.from_env()
    return _runtime_settings


def reset_runtime_settings() -> None:
    """Forget the cached settings so the next access re-reads the environment."""
    global _runtime_settings
    _runtime_settings = None


def _check_monotone(values: list[float], name: str, direction: Literal["monotone", "increasing", "decreasing"] = "monotone") -> list[float]:
    if not values:
        raise ValueError(f"{name} must not be empty")
    pairs = list(zip(values, values[1:]))
    up = all(a < b for a, b in pairs)
    down = all(b < a for a, b in pairs)
    ok = {"monotone": up or down, "increasing": up, "decreasing": down}[direction]
    if not ok:
        raise ValueError(f"{name} must be strictly {direction}, got {values}")
    return values


class GridConfig(BaseModel):
    n: int = Field(default=200, ge=3, description="Interior points of the 1D grid on Omega")
    bounds: tuple[float, float] = Field(default=(0.0, 1.0), description="Omega = (lower, upper)")

    def build(self) -> SpatialGrid:
        return SpatialGrid.interval(self.bounds[0], self.bounds[1], self.n)


class TimeConfig(BaseModel):
    horizon: float = Field(default=1.0, gt=0, description="Final time T")
    steps: int = Field(default=400, ge=2, description="Time steps M")

    def build(self) -> TimeGrid:
        return TimeGrid(horizon=self.horizon, steps=self.steps)


class RegionConfig(BaseModel):
    """Moving and fixed control regions."""

    sweep: SweepConfig = Field(default_factory=SweepConfig, description="Standard 1D sweep")
    velocity: VelocitySpec | None = Field(default=None, description="Override of the sweep velocity (flow-check)")
    margins: tuple[float, float, float, float] = Field(default=(0.02, 0.04, 0.05, 0.05), description="Nesting margins omega0 < ... < omega")
    fixed_region: tuple[float, float] = Field(default=(0.3, 0.5), description="Fixed control interval")
    rho: float | None = Field(default=None, description="Indicator ramp width (default: two cells)")

    @field_validator("margins")
    @classmethod
    def _positive_margins(cls, value: tuple[float, float, float, float]) -> tuple[float, float, float, float]:
        if any(m <= 0 for m in value):
            raise ValueError("margins must be positive")
        return value

    def fixed(self) -> BoxRegion:
        return BoxRegion(lower=(self.fixed_region[0],), upper=(self.fixed_region[1],))


class WeightsConfig(BaseModel):
    lam: float = Field(default=2.0, ge=1, description="Carleman parameter lambda")
    s: float = Field(default=1.0, gt=0, description="Carleman parameter s")
    tau_margin: float = Field(default=0.1, gt=0, lt=1, description="Time margin tau of the weight")
    eta: EtaProfile = Field(default_factory=EtaProfile)


class BeamConfig(BaseModel):
    epsilons: list[float] = Field(default=[0.02, 0.01, 0.005, 0.0025], description="Concentration parameters of the BZK beam")
    hs: list[float] = Field(default=[0.04, 0.02, 0.01, 0.005], description="Semiclassical parameters of the BBM beam")
    n: int = Field(default=400, ge=3, description="Interior points of the BZK beam grid")
    steps: int = Field(default=200, ge=2, description="Time steps of the beam runs")
    region: tuple[float, float] = Field(default=(0.1, 0.4), description="Fixed observation interval")
    bzk_x0: float = Field(default=0.75, description="Concentration point of the BZK beam")
    xi_bar: float = Field(default=1.0, description="Frequency direction of the BZK beam (+1 or -1)")
    k: int = Field(default=1, ge=1, description="Decay order k > N/4")
    bzk_delta: float = Field(default=0.2, gt=0, description="Separation radius of the BZK beam")
    bbm_x0: float = Field(default=0.7, description="Centre of the BBM beam")
    xi0: float = Field(default=0.5, description="Frequency of the BBM beam")
    bbm_delta: float = Field(default=0.29, gt=0, description="Cutoff radius of the BBM beam")
    bbm_plateau: float = Field(default=0.75, ge=0.5, lt=1.0, description="Fraction of the BBM cutoff radius where f0 = 1")
    bbm_phase_norm: Literal["hermitian", "bilinear"] = Field(default="bilinear", description="Normalization q of the BBM correctors")
    bbm_n: int = Field(default=1600, ge=3, description="Interior points of the BBM beam grid; resolves the frequency xi0 / h at the smallest h")
    advection: float = Field(default=1.0, description="Constant BBM advection A")

    @field_validator("epsilons", "hs")
    @classmethod
    def _monotone(cls, value: list[float]) -> list[float]:
        if any(v <= 0 for v in value):
            raise ValueError("sweep parameters must be positive")
        return _check_monotone(value, "sweep list")


class HUMConfig(BaseModel):
    equation: Literal["bzk", "bbm"] = Field(default="bzk", description="Equation of the hum family")
    beta: float = Field(default=1e-8, gt=0, description="Penalty of the single null-control run")
    betas: list[float] = Field(default=[1e-4, 1e-5, 1e-6, 1e-7, 1e-8], description="Penalties of the dichotomy sweep")
    tol: float = Field(default=1e-8, gt=0, description="Relative CG residual tolerance")
    max_iter: int = Field(default=500, ge=1, description="CG iteration cap")
    advection: float = Field(default=1.0, description="Constant BBM advection A")
    strict: bool = Field(default=False, description="Raise when CG hits its cap")
    moving_growth_max: float = Field(default=1.5, gt=0, description="Expected ceiling of the moving-region cost growth per decade of beta")
    fixed_growth_min: float = Field(default=3.0, gt=0, description="Expected floor of the fixed-region cost growth per decade of beta")

    @field_validator("betas")
    @classmethod
    def _decreasing(cls, value: list[float]) -> list[float]:
        if any(v <= 0 for v in value):
            raise ValueError("betas must be positive")
        return _check_monotone(value, "betas", direction="decreasing")


class CarlemanConfig(BaseModel):
    s0: float = Field(default=1.0, gt=0, description="Base value of s")
    tau0: float = Field(default=1.0, gt=0, description="Base value of tau for the elliptic lemmas")
    lam: float = Field(default=2.0, ge=1, description="lambda used by the inequality suites")
    samples: int = Field(default=20, ge=1, description="Random test functions per suite")
    n: int = Field(default=64, ge=3, description="Interior points of the Carleman grid")
    steps: int = Field(default=64, ge=2, description="Time steps of the Carleman grid")
    claim_tau: float = Field(default=10.0, gt=0, description="tau of the pointwise claim scan")
    lambda_scan: list[float] = Field(default=[1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0], description="lambda values of the claim scan")

    @field_validator("lambda_scan")
    @classmethod
    def _increasing(cls, value: list[float]) -> list[float]:
        return _check_monotone(value, "lambda_scan", direction="increasing")


class ExperimentConfig(BaseModel):
    """Complete description of a run; loaded from one JSON document."""

    grid: GridConfig = Field(default_factory=GridConfig)
    time: TimeConfig = Field(default_factory=TimeConfig)
    region: RegionConfig = Field(default_factory=RegionConfig)
    weights: WeightsConfig = Field(default_factory=WeightsConfig)
    beams: BeamConfig = Field(default_factory=BeamConfig)
    hum: HUMConfig = Field(default_factory=HUMConfig)
    carleman: CarlemanConfig = Field(default_factory=CarlemanConfig)
    families: list[Family] = Field(default=list(FAMILIES), description="Families executed by `run`")
    seed: int = Field(default=0, description="Seed of every random draw")
    output_dir: str = Field(default="results", description="Directory receiving CSV files and the manifest")

    @model_validator(mode="after")
    def _check_margin(self) -> ExperimentConfig:
        if not self.weights.tau_margin < min(1.0, 0.5 * self.time.horizon):
            raise ValueError("weights.tau_margin must be smaller than min(1, T/2)")
        if not self.families:
            raise ValueError("families must not be empty")
        return self

    @classmethod
    def from_json_file(cls, path: str | Path) -> ExperimentConfig:
        return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)
