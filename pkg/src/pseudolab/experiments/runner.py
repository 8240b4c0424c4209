"""Execute experiment families and record what they produced."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from importlib.metadata import PackageNotFoundError
from importlib.metadata import version as _pkg_version
from pathlib import Path
from typing import Any

from pydantic import BaseModel, Field

from pseudolab.config import ExperimentConfig, Family, get_runtime_settings
from pseudolab.exceptions import LabError
from pseudolab.experiments.families import FAMILY_RUNNERS
from pseudolab.utils import atomic_write_json

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def package_version() -> str:
    """Installed version, falling back to the source tree when not installed."""
    try:
        return _pkg_version("pseudolab")
    except PackageNotFoundError:
        from pseudolab import __version__

        return __version__


class RunManifest(BaseModel):
    """Config snapshot, version, output files, timings and failures of one run."""

    version: str
    config: dict[str, Any]
    output_dir: str
    families: list[str]
    files: dict[str, list[str]] = Field(default_factory=dict, description="Output files per family, relative to output_dir")
    timings: dict[str, float] = Field(default_factory=dict, description="Wall-clock seconds per family")
    failures: dict[str, str] = Field(default_factory=dict, description="Error message per failed family")

    @property
    def ok(self) -> bool:
        return not self.failures

    def write(self) -> Path:
        return atomic_write_json(Path(self.output_dir) / MANIFEST_NAME, self.model_dump(mode="json"))


def _run_family(family: Family, config: ExperimentConfig, out: Path) -> tuple[list[Path], float, str | None]:
    start = time.perf_counter()
    logger.info(f"{family}: started")
    try:
        paths = FAMILY_RUNNERS[family](config, out)
    except (LabError, ValueError, ArithmeticError) as exc:
        elapsed = time.perf_counter() - start
        logger.error(f"{family}: failed after {elapsed:.1f}s: {exc}")
        return [], elapsed, f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - start
    logger.info(f"{family}: wrote {', '.join(path.name for path in paths)} in {elapsed:.1f}s")
    return paths, elapsed, None


def run_experiments(config: ExperimentConfig, only: Family | None = None, out: str | Path | None = None) -> RunManifest:
    """Run ``only`` or every configured family and write ``manifest.json``.

    A failing family is recorded in the manifest; the others still run.
    """
    families: list[Family] = [only] if only is not None else list(dict.fromkeys(config.families))
    out_dir = Path(config.output_dir if out is None else out)
    out_dir.mkdir(parents=True, exist_ok=True)

    workers = max(1, min(get_runtime_settings().threads, len(families)))
    with ThreadPoolExecutor(max_workers=workers) as executor:
        outcomes = list(executor.map(lambda family: _run_family(family, config, out_dir), families))

    manifest = RunManifest(
        version=package_version(),
        config=config.model_dump(mode="json"),
        output_dir=str(out_dir),
        families=list(families),
    )
    for family, (paths, elapsed, error) in zip(families, outcomes):
        manifest.timings[family] = round(elapsed, 3)
        if error is None:
            manifest.files[family] = [str(path.relative_to(out_dir)) for path in paths]
        else:
            manifest.failures[family] = error
    path = manifest.write()
    logger.info(f"manifest written to {path}")
    return manifest
