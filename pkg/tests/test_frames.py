"""Frame integration, monodromy, closing conditions, Kilian identity."""

import numpy as np
import pytest

from nilcyl.fourier import PeriodicFunction
from nilcyl.frames import (X_of, Y_of, closing_report, integrate_frame,
                           integrate_real_axis, kilian_identity_residual,
                           monodromy, pointwise_run)
from nilcyl.potentials import PotentialData

TWO_PI = 2 * np.pi


def constant_potential(nu_val, period=TWO_PI):
    return PotentialData(PeriodicFunction.constant(nu_val, period),
                         PeriodicFunction.zero(period),
                         PeriodicFunction.zero(period), period)


class TestIntegration:
    def test_zero_potential_stays_identity(self):
        pot = constant_potential(0.0)
        run = integrate_real_axis(pot, TWO_PI, 64, order=4)
        assert np.abs(run.C[-1][4] - np.eye(2)).max() < 1e-14
        assert run.tail == 0.0

    def test_diagonal_exponential(self):
        """zeta = diag(ic, -ic) dz integrates to diag(e^{icz}, e^{-icz})."""
        c = 1.0
        pot = constant_potential(1j * c, np.pi)
        run = integrate_real_axis(pot, 1.0, 512, order=4)
        expect = np.diag([np.exp(1j * c), np.exp(-1j * c)])
        assert np.abs(run.C[-1][4] - expect).max() < 1e-10

    def test_lemniscate_monodromy_is_identity_at_one(self, presets):
        frame, pot = presets["identity_lemniscate"]
        run = integrate_real_axis(pot, pot.period, 2048, order=16)
        M1 = monodromy(run).eval_at(1.0)
        assert np.abs(M1 - np.eye(2)).max() < 1e-8

    def test_monodromy_requires_full_period(self, presets):
        frame, pot = presets["identity_trig3"]
        run = integrate_real_axis(pot, 1.0, 64, order=8)
        with pytest.raises(ValueError, match="period"):
            monodromy(run)

    def test_monodromy_property_along_the_axis(self, presets):
        """C(t + p, lam) = M(lam) C(t, lam) at 8 interior samples."""
        frame, pot = presets["cosh_sinh_sech3"]
        lams = [1.0, np.exp(0.25j * np.pi), np.exp(2.0j)]
        run = pointwise_run(pot, lams, 2 * pot.period, 2 * 1024, nders=0)
        for il in range(len(lams)):
            C = run.S[:, il, 0]
            M = C[1024]
            scale = np.abs(C).max()
            for j in range(8):
                idx = 128 * j
                assert np.abs(C[1024 + idx] - M @ C[idx]).max() \
                    < 1e-7 * max(1.0, scale)

    def test_reality_on_real_axis(self, presets):
        """tau(C) = C for su(1,1) potentials (coefficient level)."""
        frame, pot = presets["twisted_circle"]
        run = integrate_real_axis(pot, pot.period, 1024, order=24)
        for idx in (256, 512, 1024):
            C = run.loop_at(idx)
            assert C.su11_residual() < 1e-8

    def test_pointwise_matches_series_route(self, presets):
        frame, pot = presets["twisted_circle"]
        run_c = integrate_real_axis(pot, pot.period, 512, order=24)
        lam = np.exp(0.9j)
        run_p = pointwise_run(pot, [lam], pot.period, 512, nders=0)
        assert np.abs(run_c.loop_at(-1).eval_at(lam)
                      - run_p.S[-1, 0, 0]).max() < 1e-9


class TestClosingReports:
    def test_all_presets_pass_nil_mode(self, presets):
        for name, (frame, pot) in presets.items():
            rep = closing_report(frame, pot, order=16)
            assert rep.all_pass, (name, rep.passes)
            assert rep.monodromy_residual_at_1 < 1e-7, name
            assert rep.x_off_at_1 < 1e-6, name
            assert rep.y_diag_at_1 < 1e-6, name

    def test_monodromy_signs(self, presets):
        signs = {"identity_lemniscate": 1, "identity_trig3": 1,
                 "diagonal_c1_quartic": -1, "cosh_sinh_sech3": 1,
                 "twisted_circle": -1}
        for name, (frame, pot) in presets.items():
            rep = closing_report(frame, pot, order=16,
                                 steps_per_period=1024)
            assert rep.monodromy_sign == signs[name], name

    def test_cmc_mode_examples(self, presets):
        """The c = 0 and c = 1 diagonal potentials close as CMC cylinders."""
        for name in ("identity_trig3", "diagonal_c1_quartic"):
            frame, pot = presets[name]
            rep = closing_report(frame, pot, mode="cmc_L3",
                                 steps_per_period=1024)
            assert abs(rep.cmc_alpha_residual) < 1e-8
            assert abs(rep.cmc_beta_residual) < 1e-8
            assert rep.all_pass, name

    def test_dual_route_agreement(self, presets):
        for name, (frame, pot) in presets.items():
            rep = closing_report(frame, pot, order=16)
            assert rep.dual_x_delta < 1e-6, name
            assert rep.dual_y_delta < 1e-6, name

    def test_nfold_cover(self, presets):
        frame, pot = presets["identity_trig3"]
        rep = closing_report(frame, pot, n=2, steps_per_period=1024)
        assert rep.all_pass
        assert abs(rep.area_ell - 2 * closing_report(
            frame, pot, steps_per_period=512).area_ell) < 1e-8

    def test_open_curve_reported_not_raised(self):
        """A potential violating the second condition still reports."""
        pot = PotentialData(PeriodicFunction.zero(TWO_PI),
                            PeriodicFunction.zero(TWO_PI),
                            PeriodicFunction.constant(0.5, TWO_PI), TWO_PI)
        from nilcyl.potentials import FrameData
        frame = FrameData.from_functions(
            PeriodicFunction.constant(1.0, TWO_PI),
            PeriodicFunction.zero(TWO_PI), TWO_PI)
        rep = closing_report(frame, pot, steps_per_period=256)
        assert not rep.passes["second"]
        assert not np.isfinite(rep.third_lhs)


class TestSeriesXY:
    def test_coefficient_route_on_tame_monodromy(self, presets):
        """X_of/Y_of on a representable loop agree with the pointwise route."""
        frame, pot = presets["twisted_circle"]
        run = integrate_real_axis(pot, pot.period, 2048, order=32)
        M = monodromy(run)
        X = X_of(M)
        Y = Y_of(X)
        rep = closing_report(frame, pot, order=32)
        x_off_series = (abs(X.eval_at(1.0)[0, 1]) + abs(X.eval_at(1.0)[1, 0]))
        y_diag_series = (abs(Y.eval_at(1.0)[0, 0]) + abs(Y.eval_at(1.0)[1, 1]))
        assert abs(x_off_series - rep.x_off_at_1) < 1e-6
        assert abs(y_diag_series - rep.y_diag_at_1) < 1e-5

    def test_lambda_independent_monodromy_kills_xy(self):
        from nilcyl.loops import LoopMatrix
        su = np.array([[np.cosh(0.4), np.sinh(0.4)],
                       [np.sinh(0.4), np.cosh(0.4)]], dtype=complex)
        M = LoopMatrix.from_degrees({0: su}, order=4, twisted=True)
        assert X_of(M).wiener_norm() < 1e-12
        assert Y_of(X_of(M)).wiener_norm() < 1e-12


class TestKilian:
    def test_lambda_independent_potential_vanishes(self):
        pot = constant_potential(0.7j)
        run = pointwise_run(pot, np.exp(2j * np.pi * np.arange(4) / 4),
                            TWO_PI, 256, nders=1)
        assert kilian_identity_residual(run) < 1e-12

    def test_two_presets_on_circle_points(self, presets):
        lams = np.exp(2j * np.pi * np.arange(8) / 8)
        for name in ("diagonal_c1_quartic", "twisted_circle"):
            frame, pot = presets[name]
            run = pointwise_run(pot, lams, pot.period, 2048, nders=1)
            assert kilian_identity_residual(run) < 1e-7, name

    def test_lemniscate_at_lambda_one(self, presets):
        """Lemniscate data stay within budget at lambda = 1, z = 2 pi."""
        frame, pot = presets["identity_lemniscate"]
        run = pointwise_run(pot, [1.0], pot.period, 2048, nders=1)
        assert kilian_identity_residual(run) < 1e-7


class TestConvergenceOrder:
    def test_rk4_error_ratio_on_diagonal_preset(self, presets):
        """Halving the step cuts the frame error estimate ~16x."""
        frame, pot = presets["diagonal_c1_quartic"]
        ends = {}
        for steps in (256, 512, 1024):
            run = integrate_real_axis(pot, pot.period, steps, order=12)
            ends[steps] = run.C[-1]
        est1 = np.abs(ends[256] - ends[512]).sum()
        est2 = np.abs(ends[512] - ends[1024]).sum()
        ratio = est1 / est2
        assert 16 * 0.8 <= ratio <= 16 * 1.2

    def test_integrate_frame_error_estimate_field(self, presets):
        frame, pot = presets["identity_trig3"]
        field = integrate_frame(pot, pot.period, 17, -0.1, 0.1, 3, order=8,
                                steps_per_period=128, error_estimate=True)
        assert field.error_estimate is not None
        assert np.isfinite(field.error_estimate)
        field2 = integrate_frame(pot, pot.period, 17, -0.1, 0.1, 3, order=8,
                                 steps_per_period=256, error_estimate=True)
        assert field2.error_estimate < field.error_estimate / 8


class TestFrameField:
    def test_axis_row_is_identity(self, presets):
        frame, pot = presets["identity_trig3"]
        field = integrate_frame(pot, pot.period, 9, -0.1, 0.1, 3, order=8,
                                steps_per_period=128)
        mid = list(field.ys).index(0.0)
        ident = np.zeros((17, 2, 2), dtype=complex)
        ident[8] = np.eye(2)
        assert np.abs(field.C_rel[mid] - ident[None]).max() < 1e-15

    def test_invalid_points_flagged_not_fatal(self):
        """Overflowing columns get flagged; the rest of the grid survives."""
        ts = np.arange(128) * (TWO_PI / 128)
        # near-pole h: the interpolant blows up exponentially off-axis
        h = PeriodicFunction.from_samples(
            1.0 / (np.sin(ts) - 1.005), TWO_PI)
        pot = PotentialData(PeriodicFunction.zero(TWO_PI),
                            PeriodicFunction.zero(TWO_PI), h, TWO_PI)
        field = integrate_frame(pot, TWO_PI, 9, -0.9, 0.9, 7, order=6,
                                steps_per_period=64)
        assert field.valid[3].all()  # the real axis row stays fine
        assert not field.valid.all()  # rows past the blow-up get flagged
