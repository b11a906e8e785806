import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from speakerid.errors import BadWidth, DimensionMismatch
from speakerid.rbf import (RbfNetwork, design_matrix, fit_weights, forward,
                           forward_batch, gaussian_kernel, kernel_matrix)
from oracles import gauss_solve, naive_forward

vectors = st.lists(st.floats(min_value=-10.0, max_value=10.0),
                   min_size=1, max_size=6).map(np.array)


def random_network(rng, m=4, d=3, c=2):
    centers = rng.normal(size=(m, d))
    widths = rng.uniform(0.5, 2.0, size=m)
    weights = rng.normal(size=(m, c))
    bias = rng.normal(size=c)
    return RbfNetwork(centers=centers, widths=widths, weights=weights,
                      bias=bias)


class TestGaussianKernel:
    def test_at_center(self):
        assert gaussian_kernel([1.0, 2.0], [1.0, 2.0], 0.7) == 1.0

    def test_unit_exponent(self):
        # squared distance equal to the width -> exp(-1)
        value = gaussian_kernel([1.0, 0.0], [0.0, 0.0], 1.0)
        assert value == pytest.approx(math.exp(-1.0), rel=1e-12)

    def test_double_exponent(self):
        value = gaussian_kernel([2.0], [0.0], 2.0)
        assert value == pytest.approx(math.exp(-2.0), rel=1e-12)

    def test_range(self, rng):
        for _ in range(20):
            v = gaussian_kernel(rng.normal(size=3), rng.normal(size=3),
                                float(rng.uniform(0.1, 5.0)))
            assert 0.0 < v <= 1.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            gaussian_kernel([1.0, 2.0], [1.0], 1.0)

    def test_bad_width(self):
        with pytest.raises(BadWidth):
            gaussian_kernel([1.0], [0.0], 0.0)

    @given(x=vectors, width=st.floats(min_value=0.01, max_value=100.0))
    @settings(max_examples=50, deadline=None)
    def test_symmetric(self, x, width):
        c = x[::-1].copy()
        assert gaussian_kernel(x, c, width) == pytest.approx(
            gaussian_kernel(c, x, width), rel=1e-12)


class TestDesignMatrix:
    def test_shape_and_bias_column(self, rng):
        data = rng.normal(size=(7, 3))
        centers = rng.normal(size=(4, 3))
        widths = rng.uniform(0.5, 1.5, size=4)
        phi = design_matrix(data, centers, widths)
        assert phi.shape == (7, 5)
        assert np.array_equal(phi[:, -1], np.ones(7))

    def test_diagonal_ones_at_own_centers(self, rng):
        centers = rng.normal(size=(5, 2))
        phi = design_matrix(centers, centers, np.ones(5))
        assert np.allclose(np.diag(phi[:, :5]), 1.0, atol=1e-12)

    def test_entries_in_unit_interval(self, rng):
        phi = design_matrix(rng.normal(size=(10, 2)),
                            rng.normal(size=(3, 2)),
                            rng.uniform(0.5, 2.0, size=3))
        assert np.all(phi > 0.0)
        assert np.all(phi <= 1.0)

    def test_matches_scalar_kernel(self, rng):
        data = rng.normal(size=(6, 3))
        centers = rng.normal(size=(4, 3))
        widths = rng.uniform(0.5, 2.0, size=4)
        phi = kernel_matrix(data, centers, widths)
        for t in range(6):
            for i in range(4):
                assert phi[t, i] == pytest.approx(
                    gaussian_kernel(data[t], centers[i], widths[i]),
                    rel=1e-9, abs=1e-12)


class TestForward:
    def test_zero_weights_give_bias(self, rng):
        net = RbfNetwork(centers=rng.normal(size=(3, 2)),
                         widths=np.ones(3),
                         weights=np.zeros((3, 2)),
                         bias=np.array([4.0, -1.0]))
        assert np.allclose(forward(rng.normal(size=2), net), [4.0, -1.0])

    def test_single_center_at_center(self):
        net = RbfNetwork(centers=np.array([[1.0, 1.0]]),
                         widths=np.array([0.5]),
                         weights=np.array([[2.0]]),
                         bias=np.array([1.0]))
        assert forward(np.array([1.0, 1.0]), net)[0] == pytest.approx(3.0)

    def test_matches_naive_summation(self, rng):
        net = random_network(rng)
        for _ in range(10):
            x = rng.normal(size=3)
            expected = naive_forward(x, net.centers, net.widths,
                                     net.weights, net.bias)
            assert np.allclose(forward(x, net), expected, rtol=1e-9)

    def test_batch_matches_single(self, rng):
        net = random_network(rng)
        data = rng.normal(size=(8, 3))
        batch = forward_batch(data, net)
        for row, out in zip(data, batch):
            assert np.allclose(out, forward(row, net), atol=1e-12)

    def test_dimension_mismatch(self, rng):
        net = random_network(rng)
        with pytest.raises(DimensionMismatch):
            forward(np.zeros(5), net)


class TestFitWeights:
    def test_identity_design_interpolates(self, rng):
        targets = rng.normal(size=(5, 2))
        weights, bias = fit_weights(np.eye(5), targets, 0.0)
        theta = np.vstack([weights, bias])
        assert np.allclose(theta, targets, atol=1e-10)

    def test_interpolation_at_t_equals_m_plus_1(self, rng):
        # square nonsingular design, lambda 0: residual vanishes
        centers = rng.normal(size=(4, 2))
        data = np.vstack([centers, rng.normal(size=(1, 2))])
        widths = rng.uniform(0.5, 2.0, size=4)
        phi = design_matrix(data, centers, widths)
        targets = rng.normal(size=(5, 3))
        weights, bias = fit_weights(phi, targets, 0.0)
        pred = phi[:, :-1] @ weights + bias
        assert np.allclose(pred, targets, atol=1e-6)

    def test_normal_equation_residual_against_elimination(self, rng):
        """Gaussian-elimination oracle solves the same normal equations."""
        for _ in range(10):
            phi = rng.normal(size=(20, 6))
            targets = rng.normal(size=(20, 2))
            lam = 0.01
            weights, bias = fit_weights(phi, targets, lam)
            theta = np.vstack([weights, bias])

            penalty = np.diag([lam] * 5 + [0.0])
            oracle = gauss_solve(phi.T @ phi + penalty, phi.T @ targets)
            assert np.allclose(theta, oracle, rtol=1e-8, atol=1e-10)

    def test_large_lambda_pushes_weights_to_zero(self, rng):
        phi = design_matrix(rng.normal(size=(30, 2)),
                            rng.normal(size=(4, 2)),
                            rng.uniform(0.5, 2.0, size=4))
        targets = rng.normal(size=(30, 2)) + 3.0
        weights, bias = fit_weights(phi, targets, 1e12)
        assert np.max(np.abs(weights)) < 1e-6
        # bias is unpenalized, so it absorbs the target means
        assert np.allclose(bias, targets.mean(axis=0), atol=1e-4)

    def test_monotone_residual_in_lambda(self, rng):
        phi = design_matrix(rng.normal(size=(25, 2)),
                            rng.normal(size=(5, 2)),
                            rng.uniform(0.5, 2.0, size=5))
        targets = rng.normal(size=(25, 2))
        residuals = []
        for lam in (10.0, 1.0, 0.1, 1e-3, 1e-6, 0.0):
            weights, bias = fit_weights(phi, targets, lam)
            pred = phi[:, :-1] @ weights + bias
            residuals.append(float(np.sum((pred - targets) ** 2)))
        assert all(a >= b - 1e-9 for a, b in zip(residuals, residuals[1:]))

    def test_rank_deficient_lambda_zero_min_norm(self):
        # duplicated column: infinitely many solutions, lstsq picks the
        # minimum-norm one, which splits the weight evenly
        phi = np.array([[1.0, 1.0, 1.0],
                        [2.0, 2.0, 1.0],
                        [3.0, 3.0, 1.0]])
        targets = np.array([2.0, 4.0, 6.0])
        weights, bias = fit_weights(phi, targets, 0.0)
        assert weights[0] == pytest.approx(weights[1], abs=1e-9)
        pred = phi @ np.concatenate([weights.ravel(), bias])
        assert np.allclose(pred, targets, atol=1e-9)

    def test_1d_targets_accepted(self, rng):
        phi = rng.normal(size=(10, 3))
        weights, bias = fit_weights(phi, rng.normal(size=10), 0.1)
        assert weights.shape == (2, 1)
        assert bias.shape == (1,)

    def test_row_count_mismatch(self, rng):
        with pytest.raises(DimensionMismatch):
            fit_weights(rng.normal(size=(5, 3)), rng.normal(size=(6, 1)), 0.0)

    def test_negative_lambda(self, rng):
        with pytest.raises(ValueError):
            fit_weights(np.eye(3), np.ones((3, 1)), -1.0)


class TestRbfNetworkValidation:
    def test_width_count_mismatch(self, rng):
        with pytest.raises(DimensionMismatch):
            RbfNetwork(centers=rng.normal(size=(3, 2)),
                       widths=np.ones(2),
                       weights=np.zeros((3, 1)), bias=np.zeros(1))

    def test_nonpositive_width(self, rng):
        with pytest.raises(BadWidth):
            RbfNetwork(centers=rng.normal(size=(2, 2)),
                       widths=np.array([1.0, 0.0]),
                       weights=np.zeros((2, 1)), bias=np.zeros(1))

    def test_non_finite_weights(self, rng):
        with pytest.raises(ValueError):
            RbfNetwork(centers=rng.normal(size=(2, 2)),
                       widths=np.ones(2),
                       weights=np.array([[np.inf], [0.0]]),
                       bias=np.zeros(1))
