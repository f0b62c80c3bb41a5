"""Periodic-function interpolants: construction, calculus, algebra."""

import numpy as np
import pytest

from nilcyl.fourier import PeriodicFunction, bessel_i0

TWO_PI = 2 * np.pi


def grid(M, p=TWO_PI):
    return np.arange(M) * (p / M)


class TestFromSamples:
    def test_sin_coefficients(self):
        """sin has c_{+-1} = -+ i/2 and nothing else."""
        f = PeriodicFunction.from_samples(np.sin(grid(64)), TWO_PI)
        assert abs(f.coeff(1) + 0.5j) < 1e-14
        assert abs(f.coeff(-1) - 0.5j) < 1e-14
        others = sum(abs(f.coeff(k)) for k in range(2, f.order + 1))
        assert others < 1e-13

    def test_constant(self):
        f = PeriodicFunction.from_samples(np.ones(16), 1.0)
        assert abs(f.coeff(0) - 1.0) < 1e-15
        assert abs(f.coeff(1)) == 0.0

    def test_sech_tail_against_fourier_integral_oracle(self):
        """Interpolant coefficients match direct Fourier integrals."""
        fn = lambda t: 1.0 / np.cosh(2 * np.sin(t))
        f = PeriodicFunction.from_samples(fn(grid(256)), TWO_PI)
        assert f.tail_norm() < 1e-10
        # oracle: trapezoid Fourier integrals on a finer, unrelated grid
        tq = grid(4096)
        for k in range(0, 41, 8):
            ck = np.mean(fn(tq) * np.exp(-1j * k * tq))
            assert abs(f.coeff(k) - ck) < 1e-12

    def test_round_trip_at_sample_grid(self):
        rng = np.random.default_rng(7)
        vals = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        f = PeriodicFunction.from_samples(vals, 3.0)
        scale = np.abs(vals).max()
        assert np.abs(f.at_samples(64) - vals).max() < 1e-12 * scale

    def test_rejects_non_finite_with_index(self):
        vals = np.ones(16, dtype=complex)
        vals[11] = np.nan
        with pytest.raises(ValueError, match="index 11"):
            PeriodicFunction.from_samples(vals, 1.0)

    def test_rejects_too_few_samples(self):
        with pytest.raises(ValueError):
            PeriodicFunction.from_samples([1.0, 2.0], 1.0)


class TestEval:
    def test_sin_at_real_point(self):
        f = PeriodicFunction.from_samples(np.sin(grid(64)), TWO_PI)
        assert abs(f(np.pi / 2) - 1.0) < 1e-13

    def test_sin_at_i_is_i_sinh_1(self):
        """Strip extension: sin(i) = i sinh 1."""
        f = PeriodicFunction.from_samples(np.sin(grid(64)), TWO_PI)
        assert abs(f(1j) - 1j * np.sinh(1.0)) < 1e-12

    def test_sech_interpolant_matches_direct_evaluation(self):
        fn = lambda t: 1.0 / np.cosh(2 * np.sin(t))
        f = PeriodicFunction.from_samples(fn(grid(256)), TWO_PI)
        assert abs(f(0.3) - fn(0.3)) < 1e-10

    def test_vectorized_eval(self):
        f = PeriodicFunction.from_samples(np.cos(grid(32)), TWO_PI)
        ts = np.linspace(0, 6, 11)
        assert np.abs(f(ts) - np.cos(ts)).max() < 1e-12


class TestCalculus:
    def test_derivative_of_sin_is_cos(self):
        f = PeriodicFunction.from_samples(np.sin(grid(64)), TWO_PI)
        d = f.derivative()
        assert abs(d.coeff(1) - 0.5) < 1e-14
        assert abs(d.coeff(-1) - 0.5) < 1e-14

    def test_antiderivative_of_cos(self):
        f = PeriodicFunction.from_samples(np.cos(grid(64)), TWO_PI)
        mean, F = f.antiderivative()
        assert abs(mean) < 1e-14
        assert abs(F(np.pi / 2) - 1.0) < 1e-13
        assert abs(F(0.0)) < 1e-14

    def test_antiderivative_with_mean(self):
        """cumulative integral of 1 + cos t reaches 2 pi after a period."""
        f = PeriodicFunction.from_samples(1 + np.cos(grid(64)), TWO_PI)
        mean, F = f.antiderivative()
        assert abs(mean - 1.0) < 1e-14
        cumulative = mean * TWO_PI + F(TWO_PI) - F(0.0)
        assert abs(cumulative - TWO_PI) < 1e-12

    def test_derivative_inverts_antiderivative(self):
        rng = np.random.default_rng(3)
        vals = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        f = PeriodicFunction.from_samples(vals, 5.0)
        _, F = f.antiderivative()
        meanless = f - f.coeff(0)
        assert np.abs((F.derivative() - meanless).coeffs).max() < 1e-12


class TestAlgebra:
    def test_sin_squared_mean(self):
        f = PeriodicFunction.from_samples(np.sin(grid(64)), TWO_PI)
        assert abs((f * f).coeff(0) - 0.5) < 1e-14

    def test_conj_reflect_coefficients(self):
        f = PeriodicFunction(TWO_PI, [0.0, 0.0, 1j])  # c_1 = i
        g = f.conj_reflect()
        assert abs(g.coeff(-1) + 1j) < 1e-16

    def test_conj_reflect_is_involution(self):
        rng = np.random.default_rng(5)
        vals = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        f = PeriodicFunction.from_samples(vals, 2.5)
        assert np.abs((f.conj_reflect().conj_reflect() - f).coeffs).max() < 1e-15

    def test_conj_reflect_is_conjugate_on_real_axis(self):
        rng = np.random.default_rng(6)
        vals = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        f = PeriodicFunction.from_samples(vals, 2.5)
        ts = np.linspace(0, 2.5, 17)
        assert np.abs(f.conj_reflect()(ts) - np.conj(f(ts))).max() < 1e-12

    def test_quadrature_of_unit_circle_mode(self):
        f = PeriodicFunction.from_samples(np.exp(1j * grid(64)), TWO_PI)
        assert abs(f.quadrature()) < 1e-13

    def test_quadrature_inner_product_matches_trapezoid(self):
        """Spectral <f, g> equals the trapezoid sum on 4K+1 points."""
        rng = np.random.default_rng(8)
        f = PeriodicFunction.from_samples(
            rng.standard_normal(24) + 1j * rng.standard_normal(24), TWO_PI)
        g = PeriodicFunction.from_samples(
            rng.standard_normal(24) + 1j * rng.standard_normal(24), TWO_PI)
        spectral = (f * g.conj_reflect()).quadrature()
        M = 4 * f.order + 1
        tq = grid(M)
        trap = np.sum(f(tq) * np.conj(g(tq))) * (TWO_PI / M)
        assert abs(spectral - trap) < 1e-10

    def test_period_mismatch_raises(self):
        f = PeriodicFunction.constant(1.0, 1.0)
        g = PeriodicFunction.constant(1.0, 2.0)
        with pytest.raises(ValueError, match="period mismatch"):
            f * g

    def test_product_tail_is_tracked(self):
        rng = np.random.default_rng(9)
        f = PeriodicFunction.from_samples(
            np.exp(np.cos(grid(16))), TWO_PI)
        g = f * f
        assert g.tail > 0  # truncation to the larger operand's order


class TestPeriodChanges:
    def test_lift_then_halve_round_trips(self):
        f = PeriodicFunction.from_samples(np.cos(grid(32)), TWO_PI)
        g = f.lift_period(2).halve_period()
        assert np.isclose(g.period, TWO_PI)
        assert np.abs((g - f).coeffs).max() < 1e-15

    def test_halve_rejects_genuinely_odd_content(self):
        f = PeriodicFunction.from_samples(np.cos(grid(32) / 2), TWO_PI)
        with pytest.raises(ValueError, match="not p/2-periodic"):
            f.halve_period()


class TestBessel:
    def test_at_zero(self):
        assert bessel_i0(0.0) == 1.0

    def test_at_four_against_series_oracle(self):
        """60-term power series, summed in exact float order."""
        import math
        total = 0.0
        for k in range(59, -1, -1):
            term = (2.0 ** (2 * k)) / (math.factorial(k) ** 2)
            total += term
        assert abs(bessel_i0(4.0) - total) < 1e-12 * total
        assert abs(bessel_i0(4.0) - 11.30192195) < 1e-7

    def test_example_area_value(self):
        """-(pi/8)(I0(4) - 1) is about -4.04556."""
        T = -(np.pi / 8) * (bessel_i0(4.0) - 1.0)
        assert abs(T - (-4.04556)) < 1e-5
