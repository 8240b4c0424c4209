"""CSV emission: header row, 12 significant digits in positional notation, LF endings."""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Any

import numpy as np
import polars as pl

from pseudolab.beams import BeamReport
from pseudolab.utils import atomic_write_string

__all__ = ["SIGNIFICANT_DIGITS", "emit_csv", "format_value", "frame_from_rows", "text_frame"]

SIGNIFICANT_DIGITS = 12


def format_value(value: Any) -> str:
    """Render one cell; missing values become the empty string."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if value == 0.0:
            return "0"
        return np.format_float_positional(value, precision=SIGNIFICANT_DIGITS, unique=False, fractional=False, trim="-")
    return str(value)


def _cell(value: Any) -> str | None:
    """Formatted cell; missing values stay null so the writer leaves them empty."""
    return None if value is None else format_value(value)


def text_frame(frame: pl.DataFrame) -> pl.DataFrame:
    """Every column converted to formatted strings."""
    return pl.DataFrame(
        {name: [_cell(value) for value in frame.get_column(name).to_list()] for name in frame.columns},
        schema={name: pl.Utf8 for name in frame.columns},
    )


def frame_from_rows(rows: Sequence[Mapping[str, Any]], columns: Sequence[str] | None = None) -> pl.DataFrame:
    """Text frame from row dicts; columns default to first-seen key order."""
    if columns is None:
        columns = list(dict.fromkeys(key for row in rows for key in row))
    data = {name: [_cell(row.get(name)) for row in rows] for name in columns}
    return pl.DataFrame(data, schema={name: pl.Utf8 for name in columns})


def _as_text(report: BeamReport | pl.DataFrame | Sequence[Mapping[str, Any]]) -> pl.DataFrame:
    if isinstance(report, BeamReport):
        body = text_frame(report.to_frame())
        if not report.entries:
            return body
        footer = frame_from_rows([report.footer()], body.columns)
        return pl.concat([body, footer], how="vertical")
    if isinstance(report, pl.DataFrame):
        return text_frame(report)
    return frame_from_rows(report)


def emit_csv(report: BeamReport | pl.DataFrame | Sequence[Mapping[str, Any]], path: str | Path) -> Path:
    """Write ``report`` atomically as CSV.

    A beam report gets its slope footer row; an empty beam report or frame
    writes only the header.
    """
    text = _as_text(report).write_csv(line_terminator="\n")
    return atomic_write_string(path, text)
