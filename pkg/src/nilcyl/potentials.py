"""Frames C0, the su(1,1) potential, and the built-in presets.

A frame is a periodic holomorphic matrix

    C0(z) = [[a0(z), b0(z)], [b0*(z), a0*(z)]],   f*(z) := conj(f(conj z)),

with det C0 = a0 a0* - b0 b0* = 1, so C0 is SU(1,1)-valued on the real
axis.  Differentiating gives the connection coefficients (nu, kappa),
and a choice of periodic h turns them into the lambda-dependent
potential

    zeta = [[nu, h/lambda + lambda (kappa - h)],
            [(kappa* - h*)/lambda + lambda h*, -nu]] dz,

whose degree structure (diagonal even, off-diagonal odd) is the twisted
parity.  At lambda = 1 the potential collapses back to C0^{-1} dC0.

Presets sample closed-form frame entries and interpolate them; the
connection coefficients always come out of extract_nu_kappa so the whole
pipeline is uniform and tail norms certify the sampling accuracy.
Frames whose natural entries are only anti-periodic (the twisted_circle
preset) are represented over the doubled period; all quadratic
combinations (m, alpha, kappa, nu) remain periodic with the base period.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fourier import PeriodicFunction, bessel_i0
from .loops import LoopMatrix

__all__ = [
    "FrameData", "PotentialData", "SuPotential",
    "extract_nu_kappa", "build_zeta", "preset", "PRESET_NAMES",
    "bessel_area",
]

DEFAULT_SAMPLES = 256


@dataclass(frozen=True)
class FrameData:
    """Entries of the periodic frame matrix plus diagnostics."""

    a0: PeriodicFunction
    b0: PeriodicFunction
    period: float
    det_defect: float = 0.0
    origin_defect: float = 0.0

    @classmethod
    def from_functions(cls, a0, b0, period, tol=None):
        det = a0 * a0.conj_reflect() - b0 * b0.conj_reflect()
        det_defect = float(np.max(np.abs(det.at_samples(4 * det.order + 9) - 1.0)))
        c0 = np.array([[a0(0.0), b0(0.0)],
                       [complex(np.conj(b0(0.0))), complex(np.conj(a0(0.0)))]])
        origin_defect = float(np.max(np.abs(c0 - np.eye(2))))
        frame = cls(a0, b0, float(period), det_defect, origin_defect)
        if tol is not None and det_defect > tol:
            raise ValueError(
                f"frame determinant condition violated (max deviation "
                f"{det_defect:.3e} > {tol:.1e})")
        return frame

    def matrix_at(self, z):
        """C0 evaluated at (possibly complex) z."""
        a, b = self.a0(z), self.b0(z)
        astar = self.a0.conj_reflect()(z)
        bstar = self.b0.conj_reflect()(z)
        return np.array([[a, b], [bstar, astar]])


@dataclass(frozen=True)
class PotentialData:
    """Connection data (nu, kappa), the chosen h, and the base period."""

    nu: PeriodicFunction
    kappa: PeriodicFunction
    h: PeriodicFunction
    period: float

    def reality_defect(self):
        """Max of |nu* + nu| on the sample grid (nu must be i*real on R)."""
        s = self.nu + self.nu.conj_reflect()
        return float(np.max(np.abs(s.at_samples(4 * s.order + 9))))


def extract_nu_kappa(frame: FrameData, det_tol=1e-9):
    """Connection coefficients of C0^{-1} dC0.

    nu = a0* a0' - b0 (b0*)' and kappa = a0* b0' - b0 (a0*)', both
    periodic with the frame period.  The frame determinant condition is
    a precondition and is re-checked here.
    """
    if frame.det_defect > det_tol:
        raise ValueError(
            f"frame determinant condition violated (max deviation "
            f"{frame.det_defect:.3e} > {det_tol:.1e})")
    a0s = frame.a0.conj_reflect()
    b0s = frame.b0.conj_reflect()
    nu = a0s * frame.a0.derivative() - frame.b0 * b0s.derivative()
    kappa = a0s * frame.b0.derivative() - frame.b0 * a0s.derivative()
    return nu, kappa


class SuPotential:
    """Evaluator for the twisted loop-algebra-valued 1-form zeta."""

    def __init__(self, pot: PotentialData):
        self.pot = pot
        self.period = pot.period
        self._hstar = pot.h.conj_reflect()
        self._kstar_minus_hstar = pot.kappa.conj_reflect() - self._hstar
        self._kappa_minus_h = pot.kappa - pot.h

    def values(self, z):
        """Degree (-1, 0, +1) coefficient matrices at each z.

        Returns an array of shape z.shape + (3, 2, 2).
        """
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape + (3, 2, 2), dtype=complex)
        out[..., 0, 0, 1] = self.pot.h(z)
        out[..., 0, 1, 0] = self._kstar_minus_hstar(z)
        nu = self.pot.nu(z)
        out[..., 1, 0, 0] = nu
        out[..., 1, 1, 1] = -nu
        out[..., 2, 0, 1] = self._kappa_minus_h(z)
        out[..., 2, 1, 0] = self._hstar(z)
        return out

    def at(self, z):
        """zeta-hat(z) as an order-1 twisted LoopMatrix."""
        return LoopMatrix(self.values(complex(z)), twisted=True)

    def reality_residual(self, nsamples=64):
        """sup_t || tau_alg(zeta(t)) + zeta(t) || over one real period."""
        ts = np.arange(nsamples) * (self.period / nsamples)
        worst = 0.0
        for t in ts:
            zt = self.at(t)
            worst = max(worst, (zt.tau_alg() + zt).wiener_norm())
        return worst


def build_zeta(pot: PotentialData) -> SuPotential:
    """Assemble the potential evaluator; at lambda = 1 it equals C0^{-1} dC0."""
    return SuPotential(pot)


# ----------------------------------------------------------------------
# presets
# ----------------------------------------------------------------------

def _interp(fn, period, M=DEFAULT_SAMPLES):
    ts = np.arange(M) * (period / M)
    return PeriodicFunction.from_samples(fn(ts), period)


def bessel_area():
    """Signed area enclosed by the twisted-circle m-curve: -(pi/8)(I0(4)-1)."""
    return -(np.pi / 8.0) * (bessel_i0(4.0) - 1.0)


def _preset_identity(h_fn, period=2 * np.pi):
    one = PeriodicFunction.constant(1.0, period)
    zero = PeriodicFunction.zero(period)
    frame = FrameData.from_functions(one, zero, period)
    nu, kappa = extract_nu_kappa(frame)
    h = _interp(h_fn, period)
    return frame, PotentialData(nu, kappa, h, period)


def _preset_lemniscate():
    return _preset_identity(lambda t: (1 + 1j * np.sin(t)) / (1j + np.sin(t)) ** 2)


def _preset_trig3():
    return _preset_identity(lambda t: np.cos(t) - 1j * np.sin(3 * t))


def _preset_diagonal_quartic():
    # Diagonal frame exp(+-icz) with c = 1 and p = pi.  C0(z + pi) = -C0(z),
    # so the frame entries are stored over 2p; the monodromy at lambda = 1
    # is -id, which the first closing condition permits.
    period = np.pi
    a0 = _interp(lambda t: np.exp(1j * t), 2 * period)
    b0 = PeriodicFunction.zero(2 * period)
    frame = FrameData.from_functions(a0, b0, 2 * period)
    nu, kappa = extract_nu_kappa(frame)
    h = _interp(lambda t: np.exp(-1j * np.pi / 4) + np.sqrt(6) * np.cos(4 * t),
                period)
    return frame, PotentialData(nu.match_period(period),
                                kappa.match_period(period), h, period)


def _preset_cosh_sinh():
    period = 2 * np.pi
    a0 = _interp(lambda t: np.cosh(np.sin(t)), period)
    b0 = _interp(lambda t: np.sinh(np.sin(t)), period)
    frame = FrameData.from_functions(a0, b0, period)
    nu, kappa = extract_nu_kappa(frame)
    h = _interp(lambda t: 0.5 * np.cos(t)
                + np.cos(t) / np.cosh(2 * np.sin(t))
                - 1j * np.sin(3 * t), period)
    return frame, PotentialData(nu, kappa, h, period)


def _preset_twisted_circle():
    # The full-entry frame with anti-periodic square-root gauge: the frame
    # entries close only over 4pi, every quadratic combination over 2pi.
    period = 2 * np.pi
    a0 = _interp(lambda t: np.exp(-0.5j * t) * np.cosh(np.sin(t)),
                 2 * period, M=2 * DEFAULT_SAMPLES)
    b0 = _interp(lambda t: np.exp(-0.5j * t) * np.sinh(np.sin(t)),
                 2 * period, M=2 * DEFAULT_SAMPLES)
    frame = FrameData.from_functions(a0, b0, 2 * period)
    nu, kappa = extract_nu_kappa(frame)
    c1 = np.sqrt(abs(bessel_area()) / np.pi)
    h = _interp(lambda t: -0.25j * (2 * c1 + 2j * np.cos(t)
                                    + np.sinh(2 * np.sin(t))), period)
    return frame, PotentialData(nu.match_period(period),
                                kappa.match_period(period), h, period)


_PRESETS = {
    "identity_lemniscate": _preset_lemniscate,
    "identity_trig3": _preset_trig3,
    "diagonal_c1_quartic": _preset_diagonal_quartic,
    "cosh_sinh_sech3": _preset_cosh_sinh,
    "twisted_circle": _preset_twisted_circle,
}

PRESET_NAMES = tuple(_PRESETS)


def preset(name, period_multiplier=1):
    """Return (FrameData, PotentialData) for a named preset.

    ``period_multiplier`` restates the same data over n times the base
    period (for the relaxed n-fold closing conditions).
    """
    try:
        builder = _PRESETS[name]
    except KeyError:
        raise ValueError(
            f"unknown preset {name!r}; choose from {sorted(_PRESETS)}") from None
    frame, pot = builder()
    n = int(period_multiplier)
    if n < 1:
        raise ValueError("period multiplier must be a positive integer")
    if n != 1:
        frame = FrameData(frame.a0.lift_period(n), frame.b0.lift_period(n),
                          n * frame.period, frame.det_defect,
                          frame.origin_defect)
        pot = PotentialData(pot.nu.lift_period(n), pot.kappa.lift_period(n),
                            pot.h.lift_period(n), n * pot.period)
    return frame, pot
