"""Tests for the WKB beams of the BBM adjoint system."""

import numpy as np
import pytest
from pydantic import ValidationError

from pseudolab.beams import WKBBeamParams, bbm_beam_sweep, bbm_wkb_fields, corrected_beam, cutoff, phase
from pseudolab.flow import BoxRegion
from pseudolab.grid import SpatialGrid, TimeGrid
from pseudolab.pde import BBMCoefficients, bbm_stepper


@pytest.fixture
def wkb() -> WKBBeamParams:
    return WKBBeamParams(h=0.1, xi0=(1.0,), x0=(0.6,))


@pytest.fixture
def wkb_grid() -> tuple[SpatialGrid, TimeGrid]:
    return SpatialGrid.interval(0.0, 1.0, 63), TimeGrid(horizon=0.5, steps=8)


class TestParams:
    """Tests for parameter validation."""

    def test_zero_frequency(self):
        with pytest.raises(ValidationError, match="xi0 must be nonzero"):
            WKBBeamParams(h=0.1, xi0=(0.0,), x0=(0.5,))

    def test_bilinear_needs_small_delta(self):
        with pytest.raises(ValidationError, match="delta < \\|xi0\\|"):
            WKBBeamParams(h=0.1, xi0=(0.1,), x0=(0.5,), phase_norm="bilinear")

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError, match="share dimension"):
            WKBBeamParams(h=0.1, xi0=(1.0, 0.0), x0=(0.5,))

    def test_bilinear_is_the_default(self, wkb):
        assert wkb.phase_norm == "bilinear"
        assert wkb.plateau == 0.5

    @pytest.mark.parametrize("plateau", [0.4, 1.0])
    def test_plateau_bounds(self, plateau):
        with pytest.raises(ValidationError, match="plateau"):
            WKBBeamParams(h=0.1, xi0=(1.0,), x0=(0.5,), plateau=plateau)


class TestAnsatzPieces:
    """Tests for the cutoff and the complex phase."""

    def test_cutoff_plateau_and_support(self, wkb):
        points = np.array([[0.6], [0.65], [0.75], [0.85]])

        f0, grad = cutoff(wkb, points)

        np.testing.assert_allclose(f0, [1.0, 1.0, f0[2], 0.0])
        assert 0.0 < f0[2] < 1.0
        assert grad[2, 0] < 0.0
        np.testing.assert_array_equal(grad[[0, 1, 3]], 0.0)

    def test_wider_plateau(self, wkb):
        points = np.array([[0.6], [0.75], [0.78], [0.8]])

        f0, grad = cutoff(wkb.model_copy(update={"plateau": 0.75}), points)

        np.testing.assert_allclose(f0[[0, 1, 3]], [1.0, 1.0, 0.0])
        assert 0.0 < f0[2] < 1.0
        assert grad[2, 0] < 0.0

    def test_cutoff_ramp_is_continuous(self, wkb):
        params = wkb.model_copy(update={"plateau": 0.75})
        r = np.linspace(0.0, 0.25, 2001)

        f0, _ = cutoff(params, (0.6 + r)[:, None])

        assert np.max(np.abs(np.diff(f0))) < 0.01
        assert np.all(np.diff(f0) <= 0.0)

    def test_phase(self, wkb):
        points = np.array([[0.6], [0.8]])

        np.testing.assert_allclose(phase(wkb, points), [0.6, 0.8 + 0.02j])


class TestWKBFields:
    """Tests for the sampled ansatz and its residual."""

    def test_ball_inside_domain(self, wkb_grid, unit_advection):
        grid, time = wkb_grid
        params = WKBBeamParams(h=0.1, xi0=(1.0,), x0=(0.9,))

        with pytest.raises(ValueError, match="not inside the domain"):
            bbm_wkb_fields(params, unit_advection, grid, time)

    def test_shapes(self, wkb, wkb_grid, unit_advection):
        grid, time = wkb_grid

        fields = bbm_wkb_fields(wkb, unit_advection, grid, time)

        assert fields.psi.values.shape == (time.count, grid.n[0])
        assert fields.residual.shape == (time.steps, grid.n[0])
        assert fields.defects.shape == (time.steps, grid.size)

    def test_first_corrector_vanishes_at_final_time(self, wkb, wkb_grid, unit_advection):
        grid, time = wkb_grid

        fields = bbm_wkb_fields(wkb, unit_advection, grid, time)

        np.testing.assert_array_equal(fields.f1.final().values, 0.0)

    def test_no_advection_no_residual(self, wkb, wkb_grid):
        """Without advection psi is constant in time and solves the scheme exactly."""
        grid, time = wkb_grid

        fields = bbm_wkb_fields(wkb, BBMCoefficients.zero(1), grid, time)

        np.testing.assert_allclose(fields.f1.values, 0.0)
        np.testing.assert_allclose(fields.f2.values, 0.0)
        assert fields.residual_norm == pytest.approx(0.0, abs=1e-12)

    def test_outside_support_is_zero(self, wkb, wkb_grid, unit_advection):
        grid, time = wkb_grid
        far = np.abs(grid.axes()[0] - 0.6) >= wkb.delta

        fields = bbm_wkb_fields(wkb, unit_advection, grid, time)

        np.testing.assert_array_equal(fields.psi.values[:, far], 0.0)

    def test_hermitian_and_bilinear_agree_at_centre(self, wkb, wkb_grid, unit_advection):
        grid, time = wkb_grid
        centre = int(np.argmin(np.abs(grid.axes()[0] - 0.6)))

        hermitian = bbm_wkb_fields(wkb.model_copy(update={"phase_norm": "hermitian"}), unit_advection, grid, time)
        bilinear = bbm_wkb_fields(wkb, unit_advection, grid, time)

        assert abs(hermitian.f1.values[0, centre] - bilinear.f1.values[0, centre]) < 0.05 * abs(hermitian.f1.values[0, centre])


class TestCorrectedBeam:
    """Tests for the exact discrete adjoint built from the ansatz."""

    def test_corrected_is_exact(self, wkb, wkb_grid, unit_advection):
        grid, time = wkb_grid
        fields = bbm_wkb_fields(wkb, unit_advection, grid, time)

        psi, correction = corrected_beam(fields, unit_advection)
        defects = bbm_stepper(grid, time, unit_advection).adjoint_defects(psi.flat)

        np.testing.assert_allclose(defects, 0.0, atol=1e-10)
        np.testing.assert_array_equal(correction.initial().values, 0.0)


class TestSweep:
    """Tests for the h sweep."""

    def test_region_too_close(self, wkb, wkb_grid, unit_advection):
        grid, time = wkb_grid

        with pytest.raises(ValueError, match="of the observation region"):
            bbm_beam_sweep([0.1], BoxRegion(lower=(0.3,), upper=(0.5,)), unit_advection, grid, time, wkb)

    def test_small_sweep(self, wkb, wkb_grid, unit_advection):
        grid, time = wkb_grid

        report = bbm_beam_sweep([0.2, 0.1], BoxRegion(lower=(0.05,), upper=(0.25,)), unit_advection, grid, time, wkb)

        assert report.kind == "bbm"
        assert all(entry.residual_norm is not None for entry in report.entries)
        assert "residual_norm" in report.slopes
        assert np.isnan(report.slopes["residual_norm"])
        assert all(entry.diagnostics["ansatz_norm_initial"] > 0.0 for entry in report.entries)
