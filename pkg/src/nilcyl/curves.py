"""The plane curves driving the cylinder closing conditions.

From frame data (a0, b0) and the function h one forms the integrand

    alpha = a0^2 (2h - kappa) + b0^2 (2h - kappa)*,

its cumulative integral ell (a plane curve, closed precisely when the
mean of alpha vanishes), and the curve m = a0 b0 (always closed).  The
monodromy conditions translate into: ell closed, and signed area of ell
equal to signed area of m.  For spacelike CMC targets the second
condition is replaced by the vanishing of int beta with
beta = Im(a0 conj(b0) (2h - kappa)) = Im(m* alpha) on the real axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fourier import PeriodicFunction
from .potentials import FrameData, PotentialData

__all__ = [
    "PlaneCurve", "alpha_of", "ell_of", "m_of", "signed_area",
    "third_closing_residual", "beta_of", "cmc_inner_condition",
]

CLOSED_RTOL = 1e-8


@dataclass(frozen=True)
class PlaneCurve:
    """A curve c(t) = secular_slope * t + series(t) over [0, period]."""

    series: PeriodicFunction
    secular_slope: complex
    period: float
    closed_rtol: float = CLOSED_RTOL

    @property
    def closed(self):
        scale = float(np.max(np.abs(self.samples(64)))) + 1.0
        return abs(self.secular_slope) * self.period <= self.closed_rtol * scale

    @property
    def as_series(self):
        if not self.closed:
            raise ValueError("curve is not closed; no periodic series")
        return self.series

    def at(self, t):
        return self.secular_slope * np.asarray(t) + self.series(t)

    def samples(self, M):
        return self.at(np.arange(M) * (self.period / M))

    def derivative_series(self):
        d = self.series.derivative()
        return d + self.secular_slope


def _on_period(f: PeriodicFunction, period, tol=1e-8):
    return f.match_period(period, tol)


def _lift_pair(f: PeriodicFunction, g: PeriodicFunction):
    """Bring two functions to the common (larger) period."""
    if np.isclose(f.period, g.period, rtol=1e-12):
        return f, g
    ratio = f.period / g.period
    if np.isclose(ratio, round(ratio)) and round(ratio) >= 1:
        return f, g.lift_period(int(round(ratio)))
    ratio = g.period / f.period
    if np.isclose(ratio, round(ratio)) and round(ratio) >= 1:
        return f.lift_period(int(round(ratio))), g
    raise ValueError(f"incommensurable periods {f.period}, {g.period}")


def alpha_of(frame: FrameData, pot: PotentialData) -> PeriodicFunction:
    """alpha = a0^2 (2h - kappa) + b0^2 conj_reflect(2h - kappa).

    Stated over the potential period even when the frame entries are
    only anti-periodic (their squares are periodic).
    """
    w = 2.0 * pot.h - pot.kappa
    a0, w1 = _lift_pair(frame.a0, w)
    b0, w2 = _lift_pair(frame.b0, w.conj_reflect())
    alpha = a0 * a0 * w1 + b0 * b0 * w2
    return _on_period(alpha, pot.period)


def ell_of(alpha: PeriodicFunction) -> PlaneCurve:
    """Cumulative integral of alpha with ell(0) = 0."""
    mean, F = alpha.antiderivative()
    return PlaneCurve(series=F, secular_slope=mean, period=alpha.period)


def m_of(frame: FrameData, period=None) -> PlaneCurve:
    """m = a0 b0, automatically closed; optionally restated over ``period``."""
    m = frame.a0 * frame.b0
    if period is not None:
        m = _on_period(m, period)
    return PlaneCurve(series=m, secular_slope=0.0, period=m.period)


def signed_area(curve: PlaneCurve) -> float:
    """Orientation-signed enclosed area, (1/2) int Im(conj(c) c') dt."""
    if not curve.closed:
        raise ValueError("signed area requires a closed curve")
    c = curve.series
    integrand = c.conj_reflect() * c.derivative()
    return 0.5 * float(np.imag(integrand.quadrature()))


def third_closing_residual(frame: FrameData, pot: PotentialData, n=1):
    """Both sides of the third closing condition plus the two signed areas.

    lhs = int_0^{np} Im(alpha(t) int_0^t conj(alpha)) dt and
    rhs = int_0^{np} Im(a0 conj(b0) kappa) dt; the condition holds iff
    lhs = rhs iff area(ell) = area(m).
    """
    alpha = alpha_of(frame, pot)
    ell = ell_of(alpha)
    if not ell.closed:
        raise ValueError(
            f"ell is not closed (secular slope {ell.secular_slope:.3e}); "
            "second closing condition fails")
    # int_0^t conj(alpha(s)) ds = conj(ell(t)) for real t
    lhs_integrand = alpha * ell.series.conj_reflect()
    lhs = n * float(np.imag(lhs_integrand.quadrature()))
    a0b0s = frame.a0 * frame.b0.conj_reflect()
    prod, kap = _lift_pair(a0b0s, pot.kappa)
    rhs_integrand = _on_period(prod * kap, pot.period)
    rhs = n * float(np.imag(rhs_integrand.quadrature()))
    area_ell = n * signed_area(ell)
    area_m = n * signed_area(m_of(frame, period=pot.period))
    return lhs, rhs, (area_ell, area_m)


def beta_of(frame: FrameData, pot: PotentialData) -> PeriodicFunction:
    """beta = Im(a0 conj(b0) (2h - kappa)) as a periodic function on R."""
    w = 2.0 * pot.h - pot.kappa
    a0, b0s = _lift_pair(frame.a0, frame.b0.conj_reflect())
    g, w1 = _lift_pair(a0 * b0s, w)
    beta = (g * w1).imag_part()
    return _on_period(beta, pot.period)


def cmc_inner_condition(ellprime: PeriodicFunction, m: PlaneCurve) -> float:
    """Im of the L2 inner product <ell', m> over one period.

    Equals int beta by the identity beta = Im(m* alpha); the CMC third
    condition is that this vanishes.
    """
    f, g = _lift_pair(ellprime, m.series.conj_reflect())
    return float(np.imag((f * g).quadrature()))
