"""Periodic real-analytic functions as truncated Fourier series.

Every periodic quantity in this package (frame entries, potentials,
curve integrands) is a trigonometric interpolant

    f(z) = sum_{|k| <= K} c_k exp(2 pi i k z / p),

evaluable at complex z, which realizes the holomorphic extension of the
interpolated function to a strip around the real axis.  Instances are
immutable and all operations are pure, so values can be shared freely
between workers.
"""

from __future__ import annotations

import numpy as np

__all__ = ["PeriodicFunction", "bessel_i0"]

_TWO_PI = 2.0 * np.pi


class PeriodicFunction:
    """Truncated Fourier series of period ``period``.

    ``coeffs[j]`` is the coefficient of frequency ``k = j - order`` for
    ``j = 0 .. 2*order``.  ``tail`` accumulates the Wiener norm of
    coefficients discarded by truncating products; together with the
    outermost stored coefficients it is the accuracy diagnostic.
    """

    __slots__ = ("period", "coeffs", "order", "tail", "tail_ok")

    def __init__(self, period, coeffs, tail=0.0, tail_ok=True):
        if not period > 0:
            raise ValueError(f"period must be positive, got {period}")
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.ndim != 1 or coeffs.size % 2 == 0:
            raise ValueError("coeffs must be one-dimensional with odd length")
        coeffs = coeffs.copy()
        coeffs.flags.writeable = False
        self.period = float(period)
        self.coeffs = coeffs
        self.order = coeffs.size // 2
        self.tail = float(tail)
        self.tail_ok = bool(tail_ok)

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------
    @classmethod
    def from_samples(cls, samples, period, tail_rtol=1e-8, prune=1e-14):
        """Interpolate values given at M equispaced points over one period.

        The grid is t_j = j*period/M, j = 0..M-1.  Evaluating the result
        at the grid reproduces the samples to round-off.  Non-finite
        samples are rejected; a relative tail above ``tail_rtol`` only
        clears the ``tail_ok`` flag.

        Coefficients below ``prune`` times the largest one are zeroed:
        they are FFT round-off noise, and evaluating the series off the
        real axis amplifies high frequencies by exp(2 pi |k Im z| / p),
        so keeping the noise floor would wreck the strip extension.
        """
        samples = np.asarray(samples, dtype=complex)
        if samples.ndim != 1 or samples.size < 4:
            raise ValueError("need at least 4 samples over one period")
        bad = np.flatnonzero(~np.isfinite(samples))
        if bad.size:
            raise ValueError(f"non-finite sample at index {bad[0]}")
        M = samples.size
        spec = np.fft.fft(samples) / M
        if M % 2 == 0:
            # split the Nyquist bin symmetrically so the interpolant
            # reproduces the samples exactly
            K = M // 2
            out = np.empty(2 * K + 1, dtype=complex)
            out[1:] = np.concatenate([spec[M - K + 1:], spec[:K + 1]])
            out[0] = out[-1] = 0.5 * spec[K]
        else:
            K = (M - 1) // 2
            out = np.concatenate([spec[M - K:], spec[:K + 1]])
        if prune:
            floor = prune * np.abs(out).max()
            out[np.abs(out) < floor] = 0.0
        f = cls(period, out)
        scale = np.abs(out).sum()
        if scale > 0 and tail_rtol is not None:
            f = cls(period, out, tail_ok=(f.tail_norm() / scale) <= tail_rtol)
        return f

    @classmethod
    def constant(cls, value, period):
        return cls(period, [complex(value)])

    @classmethod
    def zero(cls, period):
        return cls(period, [0.0j])

    def coeff(self, k):
        """Coefficient c_k (0 outside the stored range)."""
        if abs(k) > self.order:
            return 0.0j
        return self.coeffs[k + self.order]

    # ------------------------------------------------------------------
    # evaluation
    # ------------------------------------------------------------------
    def __call__(self, z):
        return self.eval(z)

    def eval(self, z):
        """Evaluate the series at real or complex z (scalar or array)."""
        z = np.asarray(z, dtype=complex)
        scalar = z.ndim == 0
        zf = z.reshape(-1)
        k = np.arange(-self.order, self.order + 1)
        phases = np.exp((2j * np.pi / self.period) * zf[:, None] * k[None, :])
        vals = phases @ self.coeffs
        return complex(vals[0]) if scalar else vals.reshape(z.shape)

    def sample_grid(self, M):
        return np.arange(M) * (self.period / M)

    def at_samples(self, M):
        return self.eval(self.sample_grid(M))

    # ------------------------------------------------------------------
    # calculus
    # ------------------------------------------------------------------
    def derivative(self):
        k = np.arange(-self.order, self.order + 1)
        return PeriodicFunction(self.period,
                                self.coeffs * (2j * np.pi / self.period) * k,
                                tail=self.tail)

    def antiderivative(self):
        """Return (mean, F) with cumulative integral = t*mean + F(t), F(0)=0."""
        k = np.arange(-self.order, self.order + 1)
        F = np.zeros_like(self.coeffs)
        nz = k != 0
        F[nz] = self.coeffs[nz] / ((2j * np.pi / self.period) * k[nz])
        F[self.order] = -F[nz].sum()
        return complex(self.coeffs[self.order]), PeriodicFunction(
            self.period, F, tail=self.tail)

    def quadrature(self):
        """Integral over one period: p * c_0 (exact for the interpolant)."""
        return self.period * complex(self.coeffs[self.order])

    # ------------------------------------------------------------------
    # algebra
    # ------------------------------------------------------------------
    def conj_reflect(self):
        """f*(z) = conj(f(conj(z))); equals conj(f) on the real axis."""
        return PeriodicFunction(self.period, np.conj(self.coeffs[::-1]),
                                tail=self.tail, tail_ok=self.tail_ok)

    def real_part(self):
        """Series of Re f on the real axis, (f + f*)/2."""
        return 0.5 * (self + self.conj_reflect())

    def imag_part(self):
        """Series of Im f on the real axis, (f - f*)/(2i)."""
        return (self - self.conj_reflect()) * (-0.5j)

    def _binary(self, other, op):
        if isinstance(other, PeriodicFunction):
            if not np.isclose(self.period, other.period, rtol=1e-12, atol=0):
                raise ValueError(
                    f"period mismatch: {self.period} vs {other.period}")
            Ka, Kb = self.order, other.order
            K = max(Ka, Kb)
            a = np.zeros(2 * K + 1, dtype=complex)
            b = np.zeros(2 * K + 1, dtype=complex)
            a[K - Ka:K + Ka + 1] = self.coeffs
            b[K - Kb:K + Kb + 1] = other.coeffs
            return PeriodicFunction(self.period, op(a, b),
                                    tail=self.tail + other.tail)
        c = np.array(self.coeffs)
        c[self.order] = op(c[self.order], complex(other))
        return PeriodicFunction(self.period, c, tail=self.tail)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return PeriodicFunction(self.period, -self.coeffs, tail=self.tail)

    def __mul__(self, other):
        if not isinstance(other, PeriodicFunction):
            return PeriodicFunction(self.period, self.coeffs * complex(other),
                                    tail=abs(complex(other)) * self.tail)
        if not np.isclose(self.period, other.period, rtol=1e-12, atol=0):
            raise ValueError(
                f"period mismatch: {self.period} vs {other.period}")
        full = np.convolve(self.coeffs, other.coeffs)
        K = max(self.order, other.order)
        Kf = self.order + other.order
        lo, hi = Kf - K, Kf + K + 1
        dropped = np.abs(full[:lo]).sum() + np.abs(full[hi:]).sum()
        return PeriodicFunction(self.period, full[lo:hi],
                                tail=dropped + self.tail + other.tail)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / complex(scalar))

    # ------------------------------------------------------------------
    # diagnostics and period changes
    # ------------------------------------------------------------------
    def tail_norm(self):
        """Wiener norm of the outermost coefficients plus accumulated loss."""
        K = self.order
        edge = 0.0
        for k in range(max(K - 1, 0), K + 1):
            edge += abs(self.coeff(k)) + abs(self.coeff(-k))
        return edge + self.tail

    def wiener_norm(self):
        return float(np.abs(self.coeffs).sum())

    def pad_to(self, order):
        if order < self.order:
            raise ValueError("pad_to cannot shrink the series")
        c = np.zeros(2 * order + 1, dtype=complex)
        c[order - self.order:order + self.order + 1] = self.coeffs
        return PeriodicFunction(self.period, c, tail=self.tail,
                                tail_ok=self.tail_ok)

    def lift_period(self, n):
        """Reinterpret with period n*p (coefficients move to slots n*k)."""
        n = int(n)
        if n < 1:
            raise ValueError("lift factor must be a positive integer")
        c = np.zeros(2 * n * self.order + 1, dtype=complex)
        c[::n] = self.coeffs
        return PeriodicFunction(n * self.period, c, tail=self.tail,
                                tail_ok=self.tail_ok)

    def double_period(self):
        """Reinterpret with period 2p (coefficients move to even slots)."""
        return self.lift_period(2)

    def halve_period(self, tol=1e-8):
        """Project onto period p/2; odd-frequency content must be negligible."""
        K = self.order
        odd = np.abs(self.coeffs[(np.arange(2 * K + 1) - K) % 2 == 1]).sum()
        scale = self.wiener_norm() + 1.0
        if odd > tol * scale:
            raise ValueError(
                f"function is not p/2-periodic (odd-frequency norm {odd:.3e})")
        even = self.coeffs[(np.arange(2 * K + 1) - K) % 2 == 0]
        return PeriodicFunction(self.period / 2, even,
                                tail=self.tail + odd, tail_ok=self.tail_ok)

    def match_period(self, period, tol=1e-8):
        """Re-express with the given period (integer ratio up or down)."""
        if np.isclose(period, self.period, rtol=1e-12):
            return self
        if np.isclose(period, 2 * self.period, rtol=1e-12):
            return self.double_period()
        if np.isclose(period, self.period / 2, rtol=1e-12):
            return self.halve_period(tol)
        raise ValueError(f"cannot convert period {self.period} to {period}")

    def __repr__(self):
        return (f"PeriodicFunction(period={self.period:.6g}, "
                f"order={self.order}, tail={self.tail:.2e})")


def bessel_i0(x):
    """Modified Bessel function I_0 by its power series.

    Terms are added until the next one falls below 1e-17 of the partial
    sum; adequate for |x| <= 100.
    """
    x = float(x)
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        term *= (x * x / 4.0) / (k * k)
        total += term
        if abs(term) < 1e-17 * abs(total):
            return total
        if k > 1000:
            raise ValueError("bessel_i0 series did not converge")
