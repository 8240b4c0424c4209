"""Tests for grids, fields and quadrature."""

import numpy as np
import pytest
from pydantic import ValidationError

from pseudolab.grid import ScalarField, SpaceTimeField, SpatialGrid, TimeGrid, inner_product, integrate, integrate_values


class TestSpatialGrid:
    """Tests for the interior-node grid."""

    def test_spacing_and_nodes(self):
        """Interior nodes sit at lower + (i + 1) h with h = L / (n + 1)."""
        grid = SpatialGrid.interval(0.0, 1.0, 9)

        assert grid.spacing == pytest.approx((0.1,))
        np.testing.assert_allclose(grid.axes()[0], np.linspace(0.1, 0.9, 9))

    def test_layers_extend_axes(self):
        """layers=1 adds the boundary nodes."""
        grid = SpatialGrid.interval(0.0, 1.0, 9)

        axis = grid.axes(layers=1)[0]

        assert axis[0] == pytest.approx(0.0)
        assert axis[-1] == pytest.approx(1.0)
        assert grid.mesh(2).shape == (13, 1)

    def test_rectangle_shape(self):
        """2D grids store values in C order with one axis per dimension."""
        grid = SpatialGrid.rectangle((0.0, 0.0), (1.0, 2.0), (4, 5))

        assert grid.shape == (4, 5)
        assert grid.size == 20
        assert grid.points().shape == (20, 2)
        assert grid.cell_volume == pytest.approx(0.2 * 2.0 / 6.0)

    def test_refined_grid_nests(self):
        """Every coarse node is a node of the refined grid."""
        coarse = SpatialGrid.interval(0.0, 1.0, 7)
        fine = coarse.refined(2)

        assert fine.n == (15,)
        np.testing.assert_allclose(fine.axes()[0][1::2], coarse.axes()[0])

    def test_too_few_points_rejected(self):
        """Each axis needs at least three interior points."""
        with pytest.raises(ValidationError, match="at least 3 interior points"):
            SpatialGrid.interval(0.0, 1.0, 2)

    def test_empty_interval_rejected(self):
        with pytest.raises(ValidationError, match="empty interval"):
            SpatialGrid.interval(1.0, 1.0, 5)


class TestTimeGrid:
    """Tests for the uniform time grid."""

    def test_trapezoid_weights_sum_to_horizon(self):
        time = TimeGrid(horizon=2.0, steps=8)

        weights = time.trapezoid_weights()

        assert weights.sum() == pytest.approx(2.0)
        assert weights[0] == pytest.approx(0.125)
        assert time.count == 9

    def test_refined_halves_step(self):
        time = TimeGrid(horizon=1.0, steps=10)

        assert time.refined(2).dt == pytest.approx(0.05)


class TestFields:
    """Tests for scalar and space-time fields."""

    def test_values_are_read_only(self, small_grid, small_time):
        field = SpaceTimeField.zeros(small_grid, small_time)

        with pytest.raises(ValueError):
            field.values[0, 0] = 1.0

    def test_wrong_size_rejected(self, small_grid, small_time):
        with pytest.raises(ValidationError, match="expected"):
            SpaceTimeField(grid=small_grid, time=small_time, values=np.zeros(3))

    def test_from_function_samples_every_slice(self, small_grid, small_time):
        field = SpaceTimeField.from_function(small_grid, small_time, lambda x, t: t * x[:, 0])

        np.testing.assert_allclose(field.final().values, small_grid.axes()[0])
        np.testing.assert_allclose(field.initial().values, 0.0)


class TestQuadrature:
    """Tests for the space-time quadrature."""

    def test_first_mode_norm_is_exact(self, small_grid, first_mode):
        """sum_i sin^2(pi i h) h = 1/2 exactly on the interior nodes."""
        mode = first_mode(small_grid)

        assert integrate(mode) == pytest.approx(0.5, rel=1e-13)
        assert mode.norm() == pytest.approx(np.sqrt(0.5), rel=1e-13)

    def test_constant_in_time_uses_trapezoid(self, small_grid, small_time, first_mode):
        field = SpaceTimeField.constant_in_time(first_mode(small_grid), small_time)

        assert integrate(field) == pytest.approx(0.5 * small_time.horizon, rel=1e-13)

    def test_mask_restricts_integral(self, small_grid, small_time, first_mode):
        field = SpaceTimeField.constant_in_time(first_mode(small_grid), small_time)
        mask = np.zeros((small_time.count, *small_grid.shape), dtype=bool)

        assert integrate(field, mask=mask) == 0.0

    def test_weight_shape_mismatch(self, small_grid):
        values = np.ones(small_grid.shape)

        with pytest.raises(ValueError, match="shape mismatch"):
            integrate_values(values, small_grid, weight=np.ones(4))

    def test_inner_product_is_hermitian(self, small_grid, first_mode):
        mode = first_mode(small_grid)
        rotated = ScalarField(grid=small_grid, values=1j * mode.values)

        assert inner_product(mode, rotated) == pytest.approx(-0.5j)
        assert inner_product(rotated, mode) == pytest.approx(0.5j)
