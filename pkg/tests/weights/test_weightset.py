"""Tests for the Carleman weight family."""

import numpy as np
import pytest

from pseudolab.weights import assemble_weights, build_eta_sweep_1d, r_on_time_grid


class TestAssembleWeights:
    """Tests for gamma, alpha and xi."""

    def test_pointwise_definitions(self, carleman_setup):
        _, time, weights, _ = carleman_setup
        m = time.steps // 2
        gamma = np.exp(weights.lam * weights.eta.values[m])

        np.testing.assert_allclose(weights.gamma[m], gamma)
        np.testing.assert_allclose(weights.xi[m], weights.r[m] * gamma)
        np.testing.assert_allclose(weights.alpha[m], weights.r[m] * (weights.exponent_factor - gamma))

    def test_extremes_per_slice(self, carleman_setup):
        _, _, weights, _ = carleman_setup
        finite = weights.finite_slices

        assert np.all(weights.alpha_star[finite] >= weights.alpha[finite].max(axis=1) - 1e-12)
        assert np.all(weights.xi_star[finite][:, None] <= weights.xi[finite])

    def test_alpha_positive(self, carleman_setup):
        _, _, weights, _ = carleman_setup

        assert weights.alpha_min > 0.0

    def test_r_shape_checked(self, sweep, small_grid, small_time):
        eta = build_eta_sweep_1d(sweep, small_grid, small_time)

        with pytest.raises(ValueError, match="r has shape"):
            assemble_weights(eta, np.ones(3), 1.0, 1.0, 0.1)

    def test_negative_lambda_rejected(self, sweep, small_grid, small_time):
        eta = build_eta_sweep_1d(sweep, small_grid, small_time)

        with pytest.raises(ValueError, match="lambda >= 0"):
            assemble_weights(eta, r_on_time_grid(small_time, 0.1), -1.0, 1.0, 0.1)


class TestKernels:
    """Tests for the normalized exponential kernels."""

    def test_alpha_kernel_normalized(self, carleman_setup):
        _, _, weights, _ = carleman_setup

        kernel = weights.kernel("alpha")

        assert kernel.max() == pytest.approx(1.0)
        np.testing.assert_array_equal(kernel[0], 0.0)
        np.testing.assert_array_equal(kernel[-1], 0.0)

    def test_kernel_ordering(self, carleman_setup):
        """alpha* >= alpha makes the starred and mixed kernels smaller."""
        _, _, weights, _ = carleman_setup
        plain = weights.kernel("alpha")

        assert np.all(weights.kernel("alpha_star") <= plain * (1.0 + 1e-12))
        assert np.all(weights.kernel("mixed") <= plain * (1.0 + 1e-12))

    def test_unknown_kernel(self, carleman_setup):
        _, _, weights, _ = carleman_setup

        with pytest.raises(ValueError, match="unknown kernel"):
            weights.kernel("beta")

    def test_zero_lambda_flat_kernel(self, sweep, small_grid, small_time):
        eta = build_eta_sweep_1d(sweep, small_grid, small_time)
        weights = assemble_weights(eta, r_on_time_grid(small_time, 0.1), 0.0, 1.0, 0.1)

        np.testing.assert_allclose(weights.kernel("alpha")[1:-1], 1.0)

    def test_weighted_powers(self, carleman_setup):
        _, _, weights, _ = carleman_setup
        finite = weights.finite_slices

        weighted = weights.weighted(2, "alpha")

        np.testing.assert_allclose(weighted[finite], (weights.xi**2 * weights.kernel("alpha"))[finite])
        np.testing.assert_array_equal(weighted[~finite], 0.0)

    def test_with_s_scales_exponent(self, carleman_setup):
        _, _, weights, _ = carleman_setup

        doubled = weights.with_s(2.0 * weights.s)

        np.testing.assert_allclose(doubled.kernel("alpha"), weights.kernel("alpha") ** 2, rtol=1e-10, atol=1e-300)
