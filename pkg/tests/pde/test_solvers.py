"""Tests for the forward and adjoint solvers and the duality check."""

import numpy as np
import pytest

from pseudolab.grid import ScalarField, SpaceTimeField, SpatialGrid, TimeGrid, helmholtz_matrix
from pseudolab.pde import (
    BBMCoefficients,
    duality_residual,
    duality_terms,
    get_stepper,
    initial_state_from_y0,
    solve_adjoint,
    solve_bbm_adjoint,
    solve_bbm_forward,
    solve_bzk_adjoint,
    solve_bzk_forward,
    solve_forward,
)


def _random_data(grid: SpatialGrid, time: TimeGrid, seed: int, complex_values: bool = False):
    rng = np.random.default_rng(seed)

    def draw(shape):
        values = rng.standard_normal(shape)
        if complex_values:
            values = values + 1j * rng.standard_normal(shape)
        return values

    z0 = ScalarField(grid=grid, values=draw(grid.shape))
    v = SpaceTimeField(grid=grid, time=time, values=draw((time.count, *grid.shape)))
    chi = SpaceTimeField(grid=grid, time=time, values=rng.uniform(0.0, 1.0, (time.count, *grid.shape)))
    psi_T = ScalarField(grid=grid, values=draw(grid.shape))
    return z0, v, chi, psi_T


class TestForward:
    """Tests for the forward solves."""

    def test_y_is_kernel_of_z(self, small_grid, small_time, first_mode):
        v = SpaceTimeField.zeros(small_grid, small_time)

        result = solve_bzk_forward(first_mode(small_grid), v)

        np.testing.assert_allclose(helmholtz_matrix(small_grid) @ result.y.values[4], result.z.values[4], atol=1e-12)

    def test_initial_state_from_y0(self, small_grid, small_time, first_mode, unit_advection):
        y0 = first_mode(small_grid)
        v = SpaceTimeField.zeros(small_grid, small_time)

        result = solve_bbm_forward(initial_state_from_y0(y0), v, None, unit_advection)

        np.testing.assert_allclose(result.y.initial().values, y0.values, atol=1e-12)

    def test_source_is_linear(self, small_grid, small_time):
        z0, v, chi, _ = _random_data(small_grid, small_time, 0)
        zero = ScalarField.zeros(small_grid)

        full = solve_forward("bzk", z0, v, chi)
        free = solve_forward("bzk", z0, SpaceTimeField.zeros(small_grid, small_time))
        forced = solve_forward("bzk", zero, v, chi)

        np.testing.assert_allclose(full.z.values, free.z.values + forced.z.values, atol=1e-12)

    def test_complex_data(self, small_grid, small_time, unit_advection):
        z0, v, chi, _ = _random_data(small_grid, small_time, 1, complex_values=True)

        result = solve_forward("bbm", z0, v, chi, unit_advection)
        real = solve_forward("bbm", z0.with_values(z0.values.real), v.with_values(v.values.real), chi, unit_advection)

        assert result.z.is_complex
        np.testing.assert_allclose(result.z.values.real, real.z.values, atol=1e-12)

    def test_grid_mismatch(self, small_grid, small_time):
        other = SpatialGrid.interval(0.0, 1.0, 9)
        v = SpaceTimeField.zeros(small_grid, small_time)

        with pytest.raises(ValueError, match="different grids"):
            solve_bzk_forward(ScalarField.zeros(other), v)


class TestSteppersRegistry:
    """Tests for get_stepper."""

    def test_bbm_needs_coefficients(self, small_grid, small_time):
        with pytest.raises(ValueError, match="advection coefficients"):
            get_stepper("bbm", small_grid, small_time)

    def test_unknown_equation(self, small_grid, small_time):
        with pytest.raises(ValueError, match="unknown equation"):
            get_stepper("kdv", small_grid, small_time)

    def test_coefficient_dimension(self, small_grid, small_time):
        with pytest.raises(ValueError, match="does not match grid dimension"):
            get_stepper("bbm", small_grid, small_time, BBMCoefficients.constant((1.0, 0.0)))


class TestAdjoint:
    """Tests for the adjoint solves."""

    def test_bzk_phi_is_kernel_of_psi(self, small_grid, small_time, first_mode):
        result = solve_bzk_adjoint(first_mode(small_grid), small_time)

        np.testing.assert_allclose(helmholtz_matrix(small_grid) @ result.phi.values[2], result.psi.values[2], atol=1e-12)
        np.testing.assert_allclose(result.psi.final().values, first_mode(small_grid).values)

    def test_bzk_adjoint_mode_decays_backward(self, small_grid, small_time, first_mode):
        result = solve_bzk_adjoint(first_mode(small_grid), small_time)

        assert result.psi.initial().norm() < result.psi.final().norm()

    def test_bbm_without_advection_is_frozen(self, small_grid, small_time, first_mode):
        mode = first_mode(small_grid)

        result = solve_bbm_adjoint(mode, small_time, BBMCoefficients.zero(1))

        np.testing.assert_array_equal(result.phi.values, 0.0)
        np.testing.assert_allclose(result.psi.values, np.broadcast_to(mode.values, result.psi.values.shape))

    def test_observed_present(self, small_grid, small_time, first_mode, unit_advection):
        result = solve_adjoint("bbm", first_mode(small_grid), small_time, unit_advection)

        assert result.observed is not None
        assert result.observed.values.shape == result.psi.values.shape


class TestDuality:
    """Tests for the discrete duality identity."""

    @pytest.mark.parametrize("which", ["bzk", "bbm"])
    def test_residual_at_rounding(self, small_grid, small_time, unit_advection, which):
        z0, v, chi, psi_T = _random_data(small_grid, small_time, 4)
        coefficients = unit_advection if which == "bbm" else None

        assert duality_residual(z0, v, chi, psi_T, which, coefficients) <= 1e-10

    def test_two_dimensional_time_dependent(self):
        grid = SpatialGrid.rectangle((0.0, 0.0), (1.0, 1.0), (7, 6))
        time = TimeGrid(horizon=0.5, steps=6)
        coefficients = BBMCoefficients(dim=2, evaluator=lambda x, t: np.stack([np.cos(t) + x[:, 1], x[:, 0] * t], axis=-1))
        z0, v, chi, psi_T = _random_data(grid, time, 5, complex_values=True)

        assert duality_residual(z0, v, chi, psi_T, "bbm", coefficients) <= 1e-10

    def test_zero_data(self, small_grid, small_time):
        zero = ScalarField.zeros(small_grid)
        v = SpaceTimeField.zeros(small_grid, small_time)

        assert duality_residual(zero, v, None, zero, "bzk") == 0.0

    def test_terms_without_source(self, small_grid, small_time, first_mode):
        mode = first_mode(small_grid)
        v = SpaceTimeField.zeros(small_grid, small_time)

        final, initial, coupling = duality_terms(mode, v, None, mode, "bzk")

        assert coupling == 0.0
        assert final == pytest.approx(initial, rel=1e-12)
