"""Inverse construction: potential data from a pair of closed curves.

Given closed analytic plane curves (ell~, m~) with equal signed areas,
split m~ = a0 b0 subject to a0 a0* - b0 b0* = 1, differentiate ell~ to
get alpha, and solve

    mu = (a0*^2 alpha - b0^2 alpha*) / (a0 a0* + b0 b0*),
    h  = (kappa + mu) / 2

so that the induced curves reproduce the inputs.  The splitting is only
determined up to a phase gauge (a0 e^{i theta}, b0 e^{-i theta}); two
conventions are provided:

* ``canonical``: a0 real positive on the real axis (reproducible, but
  the recovered h picks up the phase of m~);
* ``balanced`` (used by ``design``): the phase of m~ is split evenly
  between a0 and b0, which makes b0/a0 real on the real axis and
  reproduces the h the examples are stated with.  Curves whose phase
  winds an odd number of times yield anti-periodic frame entries, which
  are stored over the doubled period.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import PlaneCurve, signed_area
from .fourier import PeriodicFunction
from .potentials import FrameData, PotentialData, extract_nu_kappa

__all__ = [
    "CurvePair", "split_m", "mu_of", "h_from", "design", "balance_radius",
]


@dataclass(frozen=True)
class CurvePair:
    """Closed target curves with matching signed areas."""

    ell_tilde: PlaneCurve
    m_tilde: PlaneCurve
    period: float

    def area_mismatch(self):
        return abs(signed_area(self.ell_tilde) - signed_area(self.m_tilde))


def balance_radius(area):
    """Radius c with the clockwise circle c e^{-it} enclosing ``area``.

    The clockwise orientation makes the enclosed area negative, so a
    positive target is rejected; callers wanting positive area flip the
    orientation instead.
    """
    if area > 0:
        raise ValueError(
            "clockwise circle encloses non-positive area; flip orientation")
    return float(np.sqrt(-area / np.pi))


def _amplitude(msq_samples):
    # r(t)^2 = (1 + sqrt(1 + 4 |m|^2)) / 2 >= 1
    return np.sqrt((1.0 + np.sqrt(1.0 + 4.0 * msq_samples)) / 2.0)


def _phase_velocity_series(m: PeriodicFunction, rcond=1e-10):
    """Fourier series of phi' where m = rho e^{i phi} with rho real signed.

    phi' solves the convolution equation |m|^2 phi' = Im(m' conj m);
    both sides stay analytic across real zeros of m (the pole of rho'/rho
    is real there), so the Toeplitz system is solved least-squares with a
    relative cutoff absorbing the rank deficiency at the zeros.
    """
    q = m * m.conj_reflect()
    s = (m.derivative() * m.conj_reflect()).imag_part()
    K = max(q.order, s.order)
    q = q.pad_to(K)
    s = s.pad_to(K)
    dk = np.arange(-K, K + 1)
    idx = dk[:, None] - dk[None, :]
    valid = np.abs(idx) <= K
    T = np.zeros((2 * K + 1, 2 * K + 1), dtype=complex)
    T[valid] = q.coeffs[idx[valid] + K]
    sol, *_ = np.linalg.lstsq(T, s.coeffs, rcond=rcond)
    # phi' is real on R: symmetrize the coefficients
    sym = 0.5 * (sol + np.conj(sol[::-1]))
    return PeriodicFunction(m.period, sym)


def split_m(m_tilde: PlaneCurve, phase="canonical", samples=512, det_tol=1e-8):
    """Factor a closed curve as m~ = a0 b0 with the determinant condition.

    Returns FrameData; for the balanced convention with odd phase
    winding the frame entries live on the doubled period.
    """
    m = m_tilde.as_series
    period = m.period
    M = max(samples, 4 * m.order + 4)
    ts = np.arange(M) * (period / M)
    mvals = m(ts)
    scale = np.abs(mvals).max()
    if scale < 1e-14:
        one = PeriodicFunction.constant(1.0, period)
        zero = PeriodicFunction.zero(period)
        return FrameData.from_functions(one, zero, period, tol=det_tol)
    msq = np.abs(mvals) ** 2
    r = _amplitude(msq)
    if phase == "canonical":
        a0 = PeriodicFunction.from_samples(r, period)
        b0 = PeriodicFunction.from_samples(mvals / r, period)
        frame_period = period
    elif phase == "balanced":
        phiprime = _phase_velocity_series(m)
        winding = float(np.real(phiprime.coeff(0))) * period / (2 * np.pi)
        w = int(round(winding))
        if abs(winding - w) > 1e-6:
            raise ValueError(
                f"phase winding {winding:.6f} is not close to an integer")
        _, phi_osc = (phiprime - phiprime.coeff(0)).antiderivative()
        # pin the constant: principal phase at the point of largest |m|
        tstar = ts[int(np.argmax(msq))]
        phi_at = (2 * np.pi * w / period) * tstar + np.real(phi_osc(tstar))
        phi0 = float(np.angle(mvals[int(np.argmax(msq))])) - phi_at
        if w % 2 == 0:
            half = np.exp(0.5j * ((2 * np.pi * w / period) * ts
                                  + np.real(phi_osc(ts)) + phi0))
            a0 = PeriodicFunction.from_samples(r * half, period)
            b0 = PeriodicFunction.from_samples(mvals / (r * half), period)
            frame_period = period
        else:
            ts2 = np.arange(2 * M) * (period / M)
            m2 = m(ts2)
            r2 = _amplitude(np.abs(m2) ** 2)
            half = np.exp(0.5j * ((2 * np.pi * w / period) * ts2
                                  + np.real(phi_osc(ts2)) + phi0))
            a0 = PeriodicFunction.from_samples(r2 * half, 2 * period)
            b0 = PeriodicFunction.from_samples(m2 / (r2 * half), 2 * period)
            frame_period = 2 * period
    else:
        raise ValueError(f"unknown phase convention {phase!r}")
    frame = FrameData.from_functions(a0, b0, frame_period)
    if frame.det_defect > det_tol:
        raise ValueError(
            f"determinant condition failed after interpolation "
            f"(max deviation {frame.det_defect:.3e}); increase sampling")
    return frame


def mu_of(frame: FrameData, alpha: PeriodicFunction) -> PeriodicFunction:
    """mu = (a0*^2 alpha - b0^2 alpha*) / (a0 a0* + b0 b0*).

    The denominator is >= 1 on the real axis by the determinant
    condition, so the division is done pointwise on a sample grid and
    re-interpolated.
    """
    a0s = frame.a0.conj_reflect()
    alpha_f = alpha if np.isclose(alpha.period, frame.period, rtol=1e-12) \
        else alpha.lift_period(int(round(frame.period / alpha.period)))
    num = a0s * a0s * alpha_f - frame.b0 * frame.b0 * alpha_f.conj_reflect()
    den = frame.a0 * a0s + frame.b0 * frame.b0.conj_reflect()
    M = 4 * max(num.order, den.order) + 4
    ts = np.arange(M) * (frame.period / M)
    mu = PeriodicFunction.from_samples(num(ts) / np.real(den(ts)), frame.period)
    return mu.match_period(alpha.period)


def h_from(frame: FrameData, mu: PeriodicFunction) -> PeriodicFunction:
    """h = (kappa + mu) / 2."""
    _, kappa = extract_nu_kappa(frame)
    kappa = kappa.match_period(mu.period)
    return (kappa + mu) * 0.5


def design(pair: CurvePair, area_tol=1e-6, det_tol=1e-8):
    """Construct (FrameData, PotentialData) realizing a curve pair.

    The induced ell (normalized to ell(0) = 0) and m reproduce the
    inputs; an area mismatch beyond ``area_tol`` is rejected up front.
    """
    if not (pair.ell_tilde.closed and pair.m_tilde.closed):
        raise ValueError("both curves must be closed")
    mism = pair.area_mismatch()
    if mism > area_tol:
        raise ValueError(
            f"signed areas differ by {mism:.3e} "
            f"(ell: {signed_area(pair.ell_tilde):.6f}, "
            f"m: {signed_area(pair.m_tilde):.6f})")
    frame = split_m(pair.m_tilde, phase="balanced", det_tol=det_tol)
    nu, kappa = extract_nu_kappa(frame)
    alpha = pair.ell_tilde.derivative_series()
    mu = mu_of(frame, alpha)
    h = (kappa.match_period(pair.period) + mu.match_period(pair.period)) * 0.5
    pot = PotentialData(nu.match_period(pair.period),
                        kappa.match_period(pair.period), h, pair.period)
    return frame, pot
