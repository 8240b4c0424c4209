"""Scaling laws and control thresholds at the default desk-scale configuration."""

import math

import numpy as np
import polars as pl
import pytest

from pseudolab.config import ExperimentConfig
from pseudolab.experiments import run_experiments

PARSEVAL_LOWER = math.exp(-2.0) / (2.0 * math.pi) ** 2
PARSEVAL_UPPER = 1.0 / (2.0 * math.pi) ** 2


@pytest.fixture(scope="module")
def results(tmp_path_factory):
    """Output directory of one default run of the beam and control families."""
    out = tmp_path_factory.mktemp("acceptance")
    config = ExperimentConfig(families=["beam-bzk", "beam-bbm", "hum", "dichotomy"], output_dir=str(out))
    manifest = run_experiments(config)
    assert manifest.ok, manifest.failures
    return out


def _beam_table(path) -> tuple[pl.DataFrame, dict[str, float]]:
    """Data rows as floats and the slope footer as a dict."""
    table = pl.read_csv(path, infer_schema_length=0)
    body = table.filter(pl.col("param") != "slope").with_columns(pl.all().cast(pl.Float64))
    footer = table.filter(pl.col("param") == "slope").row(0, named=True)
    slopes = {name: float(value) for name, value in footer.items() if name != "param" and value not in (None, "")}
    return body, slopes


def _growth(summary: pl.DataFrame, equation: str, kind: str) -> float:
    row = summary.filter((pl.col("equation") == equation) & (pl.col("region_kind") == kind))
    return float(row["growth_per_decade"][0])


@pytest.mark.slow
class TestBZKBeam:
    """Concentrating Fourier beams of the BZK adjoint."""

    def test_parseval_sandwich(self, results):
        diagnostics = pl.read_csv(results / "beam_bzk_diagnostics.csv")

        norms = diagnostics["parseval_norm"].to_numpy()
        assert np.all(norms >= 0.9 * PARSEVAL_LOWER)
        assert np.all(norms <= 1.1 * PARSEVAL_UPPER)

    def test_localized_norm_slope(self, results):
        body, slopes = _beam_table(results / "beam_bzk.csv")

        assert slopes["norm_localized"] >= 0.55
        assert body["norm_initial"].min() >= 0.5 * PARSEVAL_LOWER


@pytest.mark.slow
class TestBBMBeam:
    """WKB beams of the BBM adjoint."""

    def test_initial_norm_exponent(self, results):
        _, slopes = _beam_table(results / "beam_bbm.csv")

        assert slopes["norm_initial"] == pytest.approx(0.5, abs=0.15)

    def test_localized_norm_exponent(self, results):
        _, slopes = _beam_table(results / "beam_bbm.csv")

        assert slopes["norm_localized"] >= 1.3

    def test_quotient_exponent_reaches_the_bound(self, results):
        """The quotient decays at least like h; the ansatz vanishes on the region, so it decays faster."""
        _, slopes = _beam_table(results / "beam_bbm.csv")

        assert slopes["ratio"] >= 0.7

    def test_residual_decreases_with_h(self, results):
        body, _ = _beam_table(results / "beam_bbm.csv")

        residuals = body.sort("param", descending=True)["residual_norm"].to_numpy()
        assert np.all(np.diff(residuals) < 0.0)


@pytest.mark.slow
class TestMovingControl:
    """Null control of sin(pi x) through the moving region."""

    def test_final_state_and_iterations(self, results):
        row = pl.read_csv(results / "hum.csv").row(0, named=True)

        assert row["relative_final_norm"] <= 1e-3
        assert row["cg_iterations"] <= 500
        assert row["converged"] is True


@pytest.mark.slow
class TestDichotomy:
    """Control cost growth as the penalty vanishes."""

    @pytest.mark.parametrize("equation", ["bzk", "bbm"])
    def test_moving_cost_is_bounded(self, results, equation):
        summary = pl.read_csv(results / "dichotomy_summary.csv")

        assert _growth(summary, equation, "moving") <= 1.5

    @pytest.mark.parametrize("equation", ["bzk", "bbm"])
    def test_fixed_cost_grows_faster_than_moving(self, results, equation):
        summary = pl.read_csv(results / "dichotomy_summary.csv")
        costs = pl.read_csv(results / f"dichotomy_{equation}.csv").filter(pl.col("region_kind") == "fixed").sort("beta", descending=True)

        assert _growth(summary, equation, "fixed") > _growth(summary, equation, "moving")
        assert np.all(np.diff(costs["cost"].to_numpy()) > 0.0)

    @pytest.mark.parametrize("equation", ["bzk", "bbm"])
    def test_summary_flags_each_bound(self, results, equation):
        summary = pl.read_csv(results / "dichotomy_summary.csv").filter(pl.col("equation") == equation)
        flags = dict(zip(summary["region_kind"].to_list(), summary["meets_expected"].to_list()))

        assert flags["moving"] is True
        assert flags["full"] is None
        assert flags["fixed"] is (_growth(summary, equation, "fixed") >= 3.0)

    @pytest.mark.xfail(strict=True, reason="sin(pi x) is analytic; the fixed-region cost grows slower than 3x per decade (see DESIGN.md)")
    @pytest.mark.parametrize("equation", ["bzk", "bbm"])
    def test_fixed_cost_growth_floor(self, results, equation):
        summary = pl.read_csv(results / "dichotomy_summary.csv")

        assert _growth(summary, equation, "fixed") >= 3.0
