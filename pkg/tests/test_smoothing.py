from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from airfoilgan.errors import DomainError
from airfoilgan.geometry import naca4
from airfoilgan.smoothing import (
    SmoothingConfig,
    deviations,
    moving_average_cyclic,
    savgol_weights,
    savitzky_golay,
    smoothing_loss,
    smoothing_loss_grad,
)

from conftest import central_diff


def brute_cyclic_mean(y):
    n = len(y)
    return np.array([sum(y[(i + j) % n] for j in (-1, 0, 1)) / 3.0 for i in range(n)])


def brute_loss(y, omega):
    d = np.asarray(y) - brute_cyclic_mean(y)
    return omega / len(y) * float(np.sum(d * d))


curves = arrays(
    np.float64,
    st.integers(3, 60),
    elements=st.floats(-1.0, 1.0, allow_nan=False, width=64),
)


class TestMovingAverage:
    def test_constant_is_fixed_point(self, backend):
        y = np.full(38, 0.5)
        np.testing.assert_array_equal(moving_average_cyclic(y), y)

    def test_wraparound_example(self, backend):
        np.testing.assert_allclose(moving_average_cyclic([1, 0, 0, 0]), [1 / 3, 1 / 3, 0, 1 / 3], atol=1e-15)

    @pytest.mark.parametrize("n", [3, 7, 38])
    def test_sinusoid_eigenvalues(self, backend, n):
        i = np.arange(n)
        for k in range(n):
            y = np.cos(2 * np.pi * k * i / n)
            lam = (1 + 2 * np.cos(2 * np.pi * k / n)) / 3
            np.testing.assert_allclose(brute_cyclic_mean(y), lam * y, atol=1e-12)
            np.testing.assert_allclose(moving_average_cyclic(y), lam * y, atol=1e-10)

    def test_too_short(self):
        with pytest.raises(DomainError):
            moving_average_cyclic([1.0, 2.0])

    @given(curves)
    def test_matches_brute_force(self, y):
        np.testing.assert_allclose(moving_average_cyclic(y), brute_cyclic_mean(y), atol=1e-14)

    @given(curves)
    def test_mean_preserved(self, y):
        assert abs(moving_average_cyclic(y).mean() - y.mean()) < 1e-12

    def test_batch_matches_rows(self, nprng):
        y = nprng.normal(size=(5, 38))
        np.testing.assert_array_equal(moving_average_cyclic(y), np.stack([moving_average_cyclic(r) for r in y]))


class TestDeviationsAndLoss:
    def test_constant_zero(self):
        np.testing.assert_array_equal(deviations(np.full(10, 3.0)), 0.0)

    def test_example(self):
        np.testing.assert_allclose(deviations([1, 0, 0, 0]), [2 / 3, -1 / 3, 0, -1 / 3], atol=1e-15)

    @given(curves)
    def test_deviations_sum_to_zero(self, y):
        assert abs(deviations(y).sum()) < 1e-12

    def test_hand_value(self, backend):
        expected = Fraction(10, 4) * (Fraction(4, 9) + Fraction(1, 9) + Fraction(1, 9))
        assert expected == Fraction(5, 3)
        assert abs(smoothing_loss([1.0, 0.0, 0.0, 0.0], 10.0) - 5 / 3) < 1e-12

    def test_constant_any_omega(self):
        for omega in (0.0, 1.0, 10.0, 100.0):
            assert smoothing_loss(np.full(38, -0.2), omega) == 0.0

    @given(curves, st.floats(0.0, 100.0))
    def test_linear_in_omega(self, y, omega):
        a = smoothing_loss(y, 2 * omega)
        b = 2 * smoothing_loss(y, omega)
        assert a == pytest.approx(b, rel=1e-12, abs=1e-300)

    @given(curves, st.floats(0.0, 50.0))
    def test_matches_brute_force(self, y, omega):
        assert smoothing_loss(y, omega) == pytest.approx(brute_loss(y, omega), rel=1e-12, abs=1e-14)

    @given(curves)
    def test_nonnegative_and_zero_iff_flat(self, y):
        loss = smoothing_loss(y, 1.0)
        assert loss >= 0
        if loss == 0:
            assert np.max(np.abs(deviations(y))) < 1e-12

    def test_negative_omega(self):
        with pytest.raises(DomainError):
            smoothing_loss(np.zeros(5), -1.0)
        with pytest.raises(DomainError):
            SmoothingConfig(omega=-0.1)

    @given(curves, st.integers(0, 100))
    def test_shift_equivariance(self, y, k):
        k = k % len(y)
        r = np.roll(y, k)
        np.testing.assert_allclose(moving_average_cyclic(r), np.roll(moving_average_cyclic(y), k), atol=1e-15)
        np.testing.assert_allclose(deviations(r), np.roll(deviations(y), k), atol=1e-15)
        np.testing.assert_allclose(smoothing_loss_grad(r, 3.0), np.roll(smoothing_loss_grad(y, 3.0), k), atol=1e-15)
        assert smoothing_loss(r, 3.0) == pytest.approx(smoothing_loss(y, 3.0), rel=1e-12, abs=1e-15)


class TestGradient:
    def test_constant_zero(self):
        np.testing.assert_array_equal(smoothing_loss_grad(np.full(38, 0.1), 10.0), 0.0)

    def test_small_example(self, backend):
        y = np.array([1.0, 0.0, 0.0, 0.0])
        fd = central_diff(lambda v: brute_loss(v, 1.0), y)
        assert np.max(np.abs(smoothing_loss_grad(y, 1.0) - fd)) < 1e-8

    def test_random_n38(self, backend, nprng):
        y = nprng.uniform(-0.3, 0.4, 38)
        fd = central_diff(lambda v: brute_loss(v, 10.0), y)
        assert np.max(np.abs(smoothing_loss_grad(y, 10.0) - fd)) < 1e-8

    def test_relative_error_many_vectors(self, nprng):
        for _ in range(100):
            y = nprng.normal(size=38)
            g = smoothing_loss_grad(y, 1.0)
            fd = central_diff(lambda v: brute_loss(v, 1.0), y)
            assert np.linalg.norm(g - fd) / np.linalg.norm(fd) < 1e-6

    def test_closed_form(self, nprng):
        n = 11
        a = np.zeros((n, n))
        for i in range(n):
            for j in (-1, 0, 1):
                a[i, (i + j) % n] += 1 / 3
        m = np.eye(n) - a
        y = nprng.normal(size=n)
        np.testing.assert_allclose(smoothing_loss_grad(y, 2.0), (4.0 / n) * m.T @ m @ y, atol=1e-14)


def lstsq_center_value(window_y, order):
    half = len(window_y) // 2
    t = np.arange(-half, half + 1, dtype=float)
    coef, *_ = np.linalg.lstsq(np.vander(t, order + 1), window_y, rcond=None)
    return np.polyval(coef, 0.0)


class TestSavitzkyGolay:
    def test_weights_5_2(self):
        np.testing.assert_allclose(savgol_weights(5, 2), np.array([-3, 12, 17, 12, -3]) / 35, atol=1e-12)

    def test_weights_match_lstsq_oracle(self):
        for window, order in [(5, 2), (7, 2), (7, 3), (9, 4), (3, 1)]:
            w = savgol_weights(window, order)
            basis = np.eye(window)
            oracle = np.array([lstsq_center_value(e, order) for e in basis])
            np.testing.assert_allclose(w, oracle, atol=1e-12)

    @pytest.mark.parametrize("cyclic", [True, False])
    def test_constant_reproduced(self, backend, cyclic):
        for window, order in [(3, 0), (5, 2), (7, 3)]:
            np.testing.assert_allclose(savitzky_golay(np.full(20, 0.07), window, order, cyclic), 0.07, atol=1e-14)

    def test_quadratic_interior(self, backend):
        t = np.arange(38, dtype=float)
        y = 0.002 * t**2 - 0.03 * t + 0.1
        out = savitzky_golay(y, 5, 2, cyclic=True)
        # away from the wrap seam the window sees a pure quadratic
        np.testing.assert_allclose(out[2:-2], y[2:-2], atol=1e-10)

    def test_quadratic_open_everywhere(self):
        t = np.arange(15, dtype=float)
        y = 0.5 * t**2 - t + 3
        np.testing.assert_allclose(savitzky_golay(y, 5, 2, cyclic=False), y, atol=1e-10)

    def test_matches_direct_fit(self, nprng):
        y = nprng.normal(size=38)
        out = savitzky_golay(y, 7, 3, cyclic=True)
        for i in range(38):
            win = np.array([y[(i + k) % 38] for k in range(-3, 4)])
            assert out[i] == pytest.approx(lstsq_center_value(win, 3), abs=1e-12)

    def test_invalid(self):
        for window, order in [(4, 2), (5, 5), (5, -1), (0, 0)]:
            with pytest.raises(DomainError):
                savitzky_golay(np.zeros(38), window, order)
        with pytest.raises(DomainError):
            savitzky_golay(np.zeros(4), 5, 2)

    def test_reduces_smoothing_on_noisy_naca(self, nprng):
        base = naca4(0.02, 0.4, 0.12)
        for _ in range(50):
            y = base + nprng.uniform(-0.01, 0.01, 38)
            assert smoothing_loss(savitzky_golay(y), 1.0) < smoothing_loss(y, 1.0)

    @given(arrays(np.float64, 38, elements=st.floats(-1, 1, width=64)))
    @settings(max_examples=200)
    def test_never_increases_roughness(self, y):
        # cyclic (5, 2) response (23 + 24c - 12c^2)/35 has magnitude <= 1
        before = smoothing_loss(y, 1.0)
        after = smoothing_loss(savitzky_golay(y), 1.0)
        assert after <= before + 1e-15
        if before > 1e-20:
            assert after < before
