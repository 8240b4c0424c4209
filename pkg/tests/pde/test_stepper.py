"""Tests for the Crank-Nicolson steppers and their transposes."""

import numpy as np
import pytest

from pseudolab.grid import SpatialGrid, TimeGrid
from pseudolab.pde import BBMCoefficients, BZKStepper, bbm_stepper, bzk_stepper


def _bzk_amplification(grid: SpatialGrid, time: TimeGrid) -> float:
    h = grid.spacing[0]
    mu = 4.0 / h**2 * np.sin(0.5 * np.pi * h) ** 2
    nu = 1.0 / (1.0 + mu) - 1.0
    return (1.0 + 0.5 * time.dt * nu) / (1.0 - 0.5 * time.dt * nu)


class TestBZKStepper:
    """Tests for N = K - I."""

    def test_first_mode_decays_exactly(self, small_grid, small_time, first_mode):
        """sin(pi x) is an eigenvector, so each step multiplies it by the CN factor."""
        stepper = bzk_stepper(small_grid, small_time)
        mode = first_mode(small_grid).flat
        factor = _bzk_amplification(small_grid, small_time)

        z, _ = stepper.forward(mode)

        np.testing.assert_allclose(z[-1], factor**small_time.steps * mode, atol=1e-12)
        assert 0.0 < factor < 1.0

    def test_residuals_recorded(self, small_grid, small_time, first_mode):
        stepper = bzk_stepper(small_grid, small_time)

        _, residuals = stepper.forward(first_mode(small_grid).flat, record_residuals=True)

        assert len(residuals) == small_time.steps
        assert max(residuals) < 1e-12

    def test_solve_inverts_apply(self, small_grid, small_time):
        stepper = bzk_stepper(small_grid, small_time)
        x = np.random.default_rng(0).standard_normal(small_grid.size)

        np.testing.assert_allclose(stepper.apply_B(stepper.solve_B(x, 1), 1), x, atol=1e-12)
        np.testing.assert_allclose(stepper.apply_C(stepper.solve_CT(x, 0), 0), x, atol=1e-12)

    def test_phi_is_kernel_of_psi(self, small_grid, small_time, first_mode):
        stepper = bzk_stepper(small_grid, small_time)
        psi = first_mode(small_grid).flat

        np.testing.assert_allclose(stepper.helmholtz(stepper.phi(psi, 0)), psi, atol=1e-12)

    def test_cached(self, small_grid, small_time):
        assert bzk_stepper(small_grid, small_time) is bzk_stepper(small_grid, small_time)


class TestBBMStepper:
    """Tests for N(t) = -D_A(t) K."""

    def test_zero_advection_is_identity(self, small_grid, small_time, first_mode):
        stepper = bbm_stepper(small_grid, small_time, BBMCoefficients.zero(1))
        mode = first_mode(small_grid).flat

        z, _ = stepper.forward(mode)

        np.testing.assert_allclose(z[-1], mode, atol=1e-13)

    @pytest.mark.parametrize("m", [0, 3])
    def test_transposes_match(self, small_grid, small_time, unit_advection, m):
        """<B x, y> = <x, B^T y> and <C x, y> = <x, C^T y>."""
        stepper = bbm_stepper(small_grid, small_time, unit_advection)
        rng = np.random.default_rng(1)
        x, y = rng.standard_normal((2, small_grid.size))

        assert np.dot(stepper.apply_B(x, m), y) == pytest.approx(np.dot(x, stepper.apply_BT(y, m)), rel=1e-12)
        assert np.dot(stepper.apply_C(x, m), y) == pytest.approx(np.dot(x, stepper.apply_CT(y, m)), rel=1e-12)

    def test_solve_b_transpose(self, small_grid, small_time, unit_advection):
        stepper = bbm_stepper(small_grid, small_time, unit_advection)
        x = np.random.default_rng(2).standard_normal(small_grid.size)

        np.testing.assert_allclose(stepper.apply_B(stepper.solve_B(x, 2), 2), x, atol=1e-11)
        np.testing.assert_allclose(stepper.apply_BT(stepper.solve_BT(x, 2), 2), x, atol=1e-11)

    def test_time_dependent_coefficients(self, small_grid, small_time):
        coefficients = BBMCoefficients(dim=1, evaluator=lambda x, t: (1.0 + t) * np.ones_like(x))
        stepper = bbm_stepper(small_grid, small_time, coefficients)

        assert abs(stepper.advection(0) - stepper.advection(small_time.steps)).max() > 0.0


class TestAdjointSweep:
    """Tests for the backward sweep and the defect correction."""

    def test_backward_has_no_defect(self, small_grid, small_time, unit_advection, first_mode):
        stepper = bbm_stepper(small_grid, small_time, unit_advection)

        psi, _ = stepper.backward(first_mode(small_grid).flat)

        np.testing.assert_allclose(stepper.adjoint_defects(psi), 0.0, atol=1e-12)

    def test_correction_repairs_defects(self, small_grid, small_time):
        """Adding the correction to any field leaves an exact adjoint solution."""
        stepper = bzk_stepper(small_grid, small_time)
        field = np.random.default_rng(3).standard_normal((small_time.count, small_grid.size))

        repaired = field + stepper.correction(stepper.adjoint_defects(field))

        np.testing.assert_allclose(stepper.adjoint_defects(repaired), 0.0, atol=1e-10)
        np.testing.assert_allclose(repaired[0], field[0])

    def test_observed_endpoints(self):
        mu = np.arange(12.0).reshape(4, 3)

        obs = BZKStepper.observed(mu)

        np.testing.assert_allclose(obs[0], mu[1])
        np.testing.assert_allclose(obs[1], 0.5 * (mu[1] + mu[2]))
        np.testing.assert_allclose(obs[-1], mu[-1])
