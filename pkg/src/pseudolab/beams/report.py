"""Sweep records for the concentrating beams and their log-log slopes."""

from __future__ import annotations

from typing import Literal

import numpy as np
import polars as pl
from pydantic import BaseModel, ConfigDict, Field

__all__ = ["MIN_FIT_POINTS", "BeamEntry", "BeamReport", "fit_slope"]

MIN_FIT_POINTS = 4

BeamKind = Literal["bzk", "bbm"]

# Column order of the CSV report
COLUMNS = ("param", "norm_initial", "norm_localized", "norm_correction", "ratio", "residual_norm")


class BeamEntry(BaseModel):
    """Norms measured for one sweep parameter (epsilon or h)."""

    model_config = ConfigDict(frozen=True)

    param: float = Field(gt=0)
    norm_initial: float = Field(ge=0, description="||psi(., 0)||^2 over Omega")
    norm_localized: float = Field(ge=0, description="||psi||^2 over the region and (0, T)")
    norm_correction: float = Field(ge=0, description="||psi*||^2 over Q")
    residual_norm: float | None = Field(default=None, description="||R||^2 over Q (WKB beams only)")
    diagnostics: dict[str, float] = Field(default_factory=dict)

    @property
    def ratio(self) -> float:
        if self.norm_initial == 0.0:
            return float("nan")
        return self.norm_localized / self.norm_initial


def fit_slope(params: list[float] | np.ndarray, values: list[float] | np.ndarray) -> float:
    """Least-squares slope of log(values) against log(params).

    NaN with fewer than four points or any non-positive value.
    """
    x = np.asarray(params, dtype=float)
    y = np.asarray(values, dtype=float)
    if x.size < MIN_FIT_POINTS or x.size != y.size:
        return float("nan")
    if np.any(x <= 0) or np.any(~np.isfinite(y)) or np.any(y <= 0):
        return float("nan")
    slope, _ = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope)


class BeamReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: BeamKind
    entries: list[BeamEntry]
    slopes: dict[str, float] = Field(default_factory=dict)

    @classmethod
    def from_entries(cls, kind: BeamKind, entries: list[BeamEntry]) -> BeamReport:
        params = [entry.param for entry in entries]
        slopes = {
            "norm_initial": fit_slope(params, [entry.norm_initial for entry in entries]),
            "norm_localized": fit_slope(params, [entry.norm_localized for entry in entries]),
            "norm_correction": fit_slope(params, [entry.norm_correction for entry in entries]),
            "ratio": fit_slope(params, [entry.ratio for entry in entries]),
        }
        if entries and all(entry.residual_norm is not None for entry in entries):
            slopes["residual_norm"] = fit_slope(params, [entry.residual_norm for entry in entries])
        return cls(kind=kind, entries=entries, slopes=slopes)

    @property
    def params(self) -> list[float]:
        return [entry.param for entry in self.entries]

    def to_frame(self) -> pl.DataFrame:
        return pl.DataFrame(
            {
                "param": [entry.param for entry in self.entries],
                "norm_initial": [entry.norm_initial for entry in self.entries],
                "norm_localized": [entry.norm_localized for entry in self.entries],
                "norm_correction": [entry.norm_correction for entry in self.entries],
                "ratio": [entry.ratio for entry in self.entries],
                "residual_norm": [entry.residual_norm for entry in self.entries],
            },
            schema={name: pl.Float64 for name in COLUMNS},
        )

    def footer(self) -> dict[str, float | str | None]:
        """Slope row appended below the data rows."""
        row: dict[str, float | str | None] = {"param": "slope"}
        for name in COLUMNS[1:]:
            row[name] = self.slopes.get(name)
        return row

    def diagnostics_frame(self) -> pl.DataFrame:
        names = sorted({key for entry in self.entries for key in entry.diagnostics})
        data: dict[str, list[float | None]] = {"param": [entry.param for entry in self.entries]}
        for name in names:
            data[name] = [entry.diagnostics.get(name) for entry in self.entries]
        return pl.DataFrame(data, schema={name: pl.Float64 for name in data})
