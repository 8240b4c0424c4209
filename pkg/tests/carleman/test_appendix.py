"""Tests for the splitting identities and the pointwise claim."""

import numpy as np
import pytest

from pseudolab.carleman import (
    ClaimReport,
    ClaimScan,
    appendix_identity_check,
    claim_b1_pointwise_check,
    claim_normalized,
    claim_threshold_scan,
    energy_identity_check,
    identity_refinement,
)
from pseudolab.grid import ScalarField, SpatialGrid
from pseudolab.logger import logger


def _bump(x: np.ndarray) -> np.ndarray:
    return np.sin(np.pi * x[:, 0]) * (1.0 + 0.5 * np.cos(2.0 * np.pi * x[:, 0]))


def _report(lam: float, margin: float) -> ClaimReport:
    return ClaimReport(lam=lam, tau=1.0, margin_off=margin, bound_on=1.0, implied_a=margin, worst_slice=0, slice_margins=[margin])


class TestSplittingIdentity:
    """Tests for the M1/M2 splitting."""

    def test_residual_is_small(self, carleman_setup):
        _, _, weights, _ = carleman_setup
        z = ScalarField.from_function(SpatialGrid.interval(0.0, 1.0, 127), _bump)

        report = appendix_identity_check(z, 0.1, weights, 0.5)

        assert report.residual < 1e-2
        assert report.weighted_laplacian > 0.0
        assert report.claim_margin is None
        assert report.h == pytest.approx(1.0 / 128)

    def test_second_order_under_refinement(self, carleman_setup):
        _, _, weights, _ = carleman_setup

        refinement = identity_refinement(_bump, SpatialGrid.interval(0.0, 1.0, 63), 0.1, weights, 0.5, levels=3)

        assert len(refinement.reports) == 3
        assert len(refinement.orders) == 2
        assert refinement.reports[-1].residual < refinement.reports[0].residual
        assert refinement.order > 1.5

    def test_single_level_has_no_order(self, carleman_setup):
        _, _, weights, _ = carleman_setup

        refinement = identity_refinement(_bump, SpatialGrid.interval(0.0, 1.0, 31), 0.1, weights, 0.5, levels=1)

        assert refinement.orders == []
        assert np.isnan(refinement.order)

    def test_levels_validated(self, carleman_setup):
        _, _, weights, _ = carleman_setup

        with pytest.raises(ValueError, match="levels must be at least 1"):
            identity_refinement(_bump, SpatialGrid.interval(0.0, 1.0, 31), 0.1, weights, 0.5, levels=0)

    def test_complex_rejected(self, carleman_setup):
        grid, _, weights, _ = carleman_setup
        z = ScalarField(grid=grid, values=1j * np.ones(grid.shape))

        with pytest.raises(ValueError, match="real z"):
            appendix_identity_check(z, 0.1, weights, 0.5)

    def test_claim_margin_attached_with_region(self, carleman_setup):
        grid, _, weights, regions = carleman_setup
        z = ScalarField.from_function(grid, _bump)

        report = appendix_identity_check(z, 0.1, weights, 0.5, region=regions[1])

        assert report.claim_margin is not None
        assert report.row()["claim_margin"] == report.claim_margin


class TestEnergyIdentity:
    """Tests for the weighted energy identity."""

    def _check(self, weights, n: int):
        grid = SpatialGrid.interval(0.0, 1.0, n)
        z = ScalarField.from_function(grid, _bump)
        G = np.cos(np.pi * grid.mesh()[..., 0])[..., None] * 0.3
        return energy_identity_check(z, G, 0.1, weights, 0.5)

    def test_residual_small_and_decreasing(self, carleman_setup):
        _, _, weights, _ = carleman_setup

        coarse = self._check(weights, 63)
        fine = self._check(weights, 127)

        assert fine.residual < 5e-2
        assert fine.residual <= coarse.residual + 1e-12
        assert fine.lhs == pytest.approx(fine.rhs, rel=5e-2)

    def test_flux_shape_checked(self, carleman_setup):
        grid, _, weights, _ = carleman_setup

        with pytest.raises(ValueError, match="G has shape"):
            energy_identity_check(ScalarField.zeros(grid), np.zeros(grid.shape), 0.1, weights, 0.5)


class TestClaim:
    """Tests for the pointwise claim on omega1."""

    def test_zero_lambda_has_zero_margin(self, carleman_setup):
        _, _, weights, regions = carleman_setup

        report = claim_b1_pointwise_check(weights.eta, 0.0, 1.0, regions[1])

        assert report.margin_off == 0.0
        assert report.bound_on == 0.0
        assert not report.passed
        assert np.isnan(report.implied_a)

    def test_normalized_is_zero_at_zero_lambda(self, carleman_setup):
        grid, _, weights, _ = carleman_setup

        np.testing.assert_array_equal(claim_normalized(weights.eta, grid, 0.5, 0.0, 1.0), 0.0)

    def test_report_shape(self, carleman_setup):
        _, time, weights, regions = carleman_setup

        report = claim_b1_pointwise_check(weights.eta, 4.0, 1.0, regions[1])

        assert len(report.slice_margins) == time.count
        assert 0 <= report.worst_slice < time.count
        assert report.margin_off == min(report.slice_margins)
        assert set(report.row()) == {"lam", "tau", "margin_off", "bound_on", "implied_a", "passed"}

    def test_tau_must_be_positive(self, carleman_setup):
        _, _, weights, regions = carleman_setup

        with pytest.raises(ValueError, match="tau must be positive"):
            claim_b1_pointwise_check(weights.eta, 2.0, 0.0, regions[1])

    def test_grids_must_match(self, sweep, small_grid, small_time, carleman_setup):
        _, _, weights, _ = carleman_setup
        region = sweep.region(small_grid, small_time, level=1)

        with pytest.raises(ValueError, match="share grids"):
            claim_b1_pointwise_check(weights.eta, 2.0, 1.0, region)


class TestClaimScan:
    """Tests for the lambda threshold."""

    def test_threshold_is_start_of_passing_tail(self):
        scan = ClaimScan(reports=[_report(1.0, 0.1), _report(2.0, -0.1), _report(3.0, 0.2), _report(4.0, 0.3)])

        assert scan.threshold == 3.0

    def test_no_threshold_when_last_fails(self):
        scan = ClaimScan(reports=[_report(1.0, 0.1), _report(2.0, -0.1)])

        assert scan.threshold is None

    def test_lambdas_must_increase(self, carleman_setup):
        _, _, weights, regions = carleman_setup

        with pytest.raises(ValueError, match="strictly increasing"):
            claim_threshold_scan(weights.eta, regions[1], 1.0, [2.0, 2.0])

    def test_warns_without_threshold(self, carleman_setup, caplog, monkeypatch):
        _, _, weights, regions = carleman_setup
        monkeypatch.setattr(logger, "propagate", True)

        with caplog.at_level("WARNING"):
            scan = claim_threshold_scan(weights.eta, regions[1], 1.0, [0.0])

        assert scan.threshold is None
        assert "claim fails at every scanned lambda" in caplog.text
