"""Truncated Laurent series with 2x2 complex matrix coefficients.

These represent loops S^1 -> SL(2,C) in the twisted loop group: the
twisting condition g(-lambda) = sigma3 g(lambda) sigma3 means diagonal
entries carry only even powers of lambda and off-diagonal entries only
odd powers.  The Wiener norm (sum of absolute values of all stored
coefficient entries) is the accuracy currency: every lossy operation
records the discarded tail.

The involution tau(g)(lambda) = sigma3 * conj(g(1/conj(lambda)))^(-T) *
sigma3 singles out the SU(1,1) real form; its fixed points are the
extended frames.  ``tau`` is computed by evaluation on the unit circle,
pointwise inversion and re-interpolation; ``tau_hat`` is its exact
coefficient-level form valid for det = 1 loops.
"""

from __future__ import annotations

import numpy as np

__all__ = ["LoopMatrix", "SingularLoopError", "identity", "sigma3_loop"]

SIGMA3 = np.diag([1.0 + 0j, -1.0 + 0j])


class SingularLoopError(ValueError):
    """A loop failed pointwise inversion on the evaluation circle."""

    def __init__(self, lam, det):
        self.lam = lam
        self.det = det
        super().__init__(
            f"loop is numerically singular at lambda = {lam:.6g} "
            f"(|det| = {abs(det):.3e})")


class LoopMatrix:
    """A(lambda) = sum_{|k| <= N} A_k lambda^k with 2x2 complex A_k.

    ``coeffs[j]`` is the coefficient of degree ``j - order``.  Values are
    immutable; operations return new instances.
    """

    __slots__ = ("coeffs", "order", "twisted", "tail")

    def __init__(self, coeffs, twisted=False, tail=0.0):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.ndim != 3 or coeffs.shape[1:] != (2, 2) or coeffs.shape[0] % 2 == 0:
            raise ValueError("coeffs must have shape (2N+1, 2, 2)")
        coeffs = coeffs.copy()
        coeffs.flags.writeable = False
        self.coeffs = coeffs
        self.order = coeffs.shape[0] // 2
        self.twisted = bool(twisted)
        self.tail = float(tail)

    # ------------------------------------------------------------------
    @classmethod
    def from_degrees(cls, degrees, order=None, twisted=False):
        """Build from a {degree: 2x2 array} mapping."""
        if order is None:
            order = max(abs(k) for k in degrees) if degrees else 0
        c = np.zeros((2 * order + 1, 2, 2), dtype=complex)
        for k, mat in degrees.items():
            c[k + order] = np.asarray(mat, dtype=complex)
        return cls(c, twisted=twisted)

    def coeff(self, k):
        if abs(k) > self.order:
            return np.zeros((2, 2), dtype=complex)
        return self.coeffs[k + self.order]

    def truncated(self, order, collect_tail=True):
        """Re-truncate to the given order, recording any dropped norm."""
        N, M = self.order, order
        if M >= N:
            c = np.zeros((2 * M + 1, 2, 2), dtype=complex)
            c[M - N:M + N + 1] = self.coeffs
            return LoopMatrix(c, twisted=self.twisted, tail=self.tail)
        dropped = (np.abs(self.coeffs[:N - M]).sum()
                   + np.abs(self.coeffs[N + M + 1:]).sum())
        tail = self.tail + (dropped if collect_tail else 0.0)
        return LoopMatrix(self.coeffs[N - M:N + M + 1],
                          twisted=self.twisted, tail=tail)

    # ------------------------------------------------------------------
    # ring operations
    # ------------------------------------------------------------------
    def mul(self, other):
        """Laurent product truncated to max(N_A, N_B)."""
        Na, Nb = self.order, other.order
        full = np.zeros((2 * (Na + Nb) + 1, 2, 2), dtype=complex)
        for j in range(2 * Nb + 1):
            full[j:j + 2 * Na + 1] += self.coeffs @ other.coeffs[j]
        out = LoopMatrix(full, twisted=self.twisted and other.twisted,
                         tail=self.tail + other.tail)
        return out.truncated(max(Na, Nb))

    def __matmul__(self, other):
        return self.mul(other)

    def __add__(self, other):
        N = max(self.order, other.order)
        a = self.truncated(N).coeffs
        b = other.truncated(N).coeffs
        return LoopMatrix(a + b, twisted=self.twisted and other.twisted,
                          tail=self.tail + other.tail)

    def __sub__(self, other):
        return self + (other * (-1.0))

    def __mul__(self, scalar):
        return LoopMatrix(self.coeffs * complex(scalar), twisted=self.twisted,
                          tail=abs(complex(scalar)) * self.tail)

    __rmul__ = __mul__

    def power(self, n):
        if n < 1:
            raise ValueError("power expects n >= 1")
        out = self
        for _ in range(n - 1):
            out = out.mul(self)
        return out

    # ------------------------------------------------------------------
    # evaluation / interpolation
    # ------------------------------------------------------------------
    def circle_values(self, M=None):
        """Evaluate on M equispaced points of the unit circle."""
        if M is None:
            M = 4 * self.order + 4
        M = max(M, 2 * self.order + 2, 8)
        arr = np.zeros((M, 2, 2), dtype=complex)
        for j in range(2 * self.order + 1):
            arr[(j - self.order) % M] += self.coeffs[j]
        return np.fft.ifft(arr, axis=0) * M

    @staticmethod
    def from_circle_values(values, order, twisted=False):
        """Inverse of circle_values; degrees beyond ``order`` become tail."""
        M = values.shape[0]
        spec = np.fft.fft(values, axis=0) / M
        Kmax = (M - 1) // 2
        order_avail = min(order, Kmax)
        c = np.zeros((2 * order + 1, 2, 2), dtype=complex)
        mask = np.ones(M, dtype=bool)
        for k in range(-order_avail, order_avail + 1):
            c[k + order] = spec[k % M]
            mask[k % M] = False
        tail = float(np.abs(spec[mask]).sum())
        return LoopMatrix(c, twisted=twisted, tail=tail)

    def eval_at(self, lam):
        """Value at a unit-modulus lambda (geometry lives on S^1 only)."""
        lam = complex(lam)
        if abs(abs(lam) - 1.0) > 1e-12:
            raise ValueError(f"|lambda| must be 1, got {abs(lam)}")
        powers = lam ** np.arange(-self.order, self.order + 1)
        return np.tensordot(powers, self.coeffs, axes=(0, 0))

    # ------------------------------------------------------------------
    # inversion and the SU(1,1) involution
    # ------------------------------------------------------------------
    def inverse(self, order=None):
        """Inverse by evaluation at >= 4N+4 circle points.

        Raises SingularLoopError when a pointwise determinant falls
        below 1e-12.
        """
        if order is None:
            order = self.order
        M = max(4 * self.order + 4, 4 * order + 4)
        vals = self.circle_values(M)
        det = vals[:, 0, 0] * vals[:, 1, 1] - vals[:, 0, 1] * vals[:, 1, 0]
        worst = np.argmin(np.abs(det))
        if abs(det[worst]) < 1e-12:
            lam = np.exp(2j * np.pi * worst / M)
            raise SingularLoopError(lam, det[worst])
        inv = np.empty_like(vals)
        inv[:, 0, 0] = vals[:, 1, 1]
        inv[:, 1, 1] = vals[:, 0, 0]
        inv[:, 0, 1] = -vals[:, 0, 1]
        inv[:, 1, 0] = -vals[:, 1, 0]
        inv /= det[:, None, None]
        return LoopMatrix.from_circle_values(inv, order, twisted=self.twisted)

    def conj_flip(self):
        """Coefficient map A_k -> conj(A_{-k}), i.e. conj(A(1/conj(lambda)))."""
        return LoopMatrix(np.conj(self.coeffs[::-1]), twisted=self.twisted,
                          tail=self.tail)

    def tau(self, order=None):
        """Group involution fixing the SU(1,1) loops."""
        if order is None:
            order = self.order
        flipped = self.conj_flip()
        M = max(4 * self.order + 4, 4 * order + 4)
        vals = flipped.circle_values(M)
        det = vals[:, 0, 0] * vals[:, 1, 1] - vals[:, 0, 1] * vals[:, 1, 0]
        worst = np.argmin(np.abs(det))
        if abs(det[worst]) < 1e-12:
            lam = np.exp(2j * np.pi * worst / M)
            raise SingularLoopError(lam, det[worst])
        # inverse transpose then conjugation by sigma3: the transpose's
        # adjugate signs and the sigma3 flip cancel on the off-diagonal,
        # leaving the double index swap divided by the determinant
        out = np.empty_like(vals)
        out[:, 0, 0] = vals[:, 1, 1]
        out[:, 1, 1] = vals[:, 0, 0]
        out[:, 0, 1] = vals[:, 1, 0]
        out[:, 1, 0] = vals[:, 0, 1]
        out /= det[:, None, None]
        return LoopMatrix.from_circle_values(out, order, twisted=self.twisted)

    def tau_hat(self, order=None):
        """Exact coefficient form of tau for det = 1 loops.

        For unimodular g, g^(-T) = J g J^(-1), which collapses tau to the
        real-linear map A_k -> E conj(A_{-k}) E with E the index swap.
        """
        c = np.conj(self.coeffs[::-1])
        res = LoopMatrix(c[:, ::-1, ::-1], twisted=self.twisted, tail=self.tail)
        return res if order is None else res.truncated(order)

    def tau_alg(self):
        """Lie-algebra involution: su(1,1) potentials satisfy tau_alg(x) = -x."""
        flipped = np.conj(self.coeffs[::-1])
        out = SIGMA3 @ flipped.transpose(0, 2, 1) @ SIGMA3
        return LoopMatrix(out, twisted=self.twisted, tail=self.tail)

    def su11_residual(self):
        """Wiener norm of tau(A) - A; zero exactly on SU(1,1) loops."""
        return (self.tau() - self).wiener_norm()

    def is_su11_on_circle(self, tol=1e-8):
        return self.su11_residual() <= tol

    # ------------------------------------------------------------------
    # derivations and norms
    # ------------------------------------------------------------------
    def lambda_d_lambda(self):
        """lambda * d/dlambda, exact on coefficients (A_k -> k A_k)."""
        k = np.arange(-self.order, self.order + 1, dtype=float)
        return LoopMatrix(self.coeffs * k[:, None, None],
                          twisted=self.twisted, tail=self.order * self.tail)

    def diag_part(self):
        c = np.zeros_like(self.coeffs)
        c[:, 0, 0] = self.coeffs[:, 0, 0]
        c[:, 1, 1] = self.coeffs[:, 1, 1]
        return LoopMatrix(c, twisted=self.twisted)

    def offdiag_part(self):
        c = np.zeros_like(self.coeffs)
        c[:, 0, 1] = self.coeffs[:, 0, 1]
        c[:, 1, 0] = self.coeffs[:, 1, 0]
        return LoopMatrix(c, twisted=self.twisted)

    def wiener_norm(self):
        return float(np.abs(self.coeffs).sum())

    def twist_defect(self):
        """Wiener norm of the parity-violating part (0 for twisted loops)."""
        k = np.arange(-self.order, self.order + 1)
        even, odd = (k % 2 == 0), (k % 2 == 1)
        bad = (np.abs(self.coeffs[odd][:, [0, 1], [0, 1]]).sum()
               + np.abs(self.coeffs[even][:, [0, 1], [1, 0]]).sum())
        return float(bad)

    def __repr__(self):
        return (f"LoopMatrix(order={self.order}, twisted={self.twisted}, "
                f"norm={self.wiener_norm():.4g}, tail={self.tail:.2e})")


def identity(order=0):
    c = np.zeros((2 * order + 1, 2, 2), dtype=complex)
    c[order] = np.eye(2)
    return LoopMatrix(c, twisted=True)


def sigma3_loop(order=0):
    c = np.zeros((2 * order + 1, 2, 2), dtype=complex)
    c[order] = SIGMA3
    return LoopMatrix(c, twisted=True)
