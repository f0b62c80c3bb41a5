"""SU(1,1) Iwasawa decomposition of twisted loops: C = F V+.

F is a fixed point of the involution tau and V+ is holomorphic in the
unit disk with diagonal, positive leading term V0; under that
normalization the splitting is unique where it exists (the big cell).
Unlike the compact case the decomposition is not global: points outside
the big cell are flagged, not repaired.

The solver poses tau-reality of F = C V+^{-1} as the equivalent linear
condition

    tau_hat(V+) = V+ . (C^{-1} tau_hat(C)),

where tau_hat is the coefficient-level (real-linear, conjugating) form
of tau valid for det = 1 loops.  Truncating V+ to degrees 0..N gives a
finite real-linear homogeneous system; the phase/scaling gauge
V+ -> diag(d, conj d) V+ is fixed by pinning the (1,1) entry of V0 to
one, the system is solved least-squares, and the solution is rescaled
so that det V+ = 1, which lands V0 on the positive diagonal slice.  Any
exact solution has real constant determinant, so the rescaling is a
gauge move, not a projection.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .loops import LoopMatrix, identity

__all__ = ["IwasawaResult", "IwasawaGrid", "iwasawa_decompose", "frame_from"]

BIG_CELL_COND = 1e10
MIN_LEADING = 1e-8


@dataclass(frozen=True)
class IwasawaResult:
    """Factors and diagnostics of one decomposition.

    Residuals are relative (scaled by 1 + the Wiener norm of the loop
    they check) so they stay meaningful for hyperbolically large loops.
    """

    F: LoopMatrix
    Vplus: LoopMatrix
    residual_reconstruction: float
    residual_reality: float
    v0: tuple
    condition_estimate: float
    ok: bool
    reason: str = ""


def _unknown_index(order):
    ks, iis, jjs = [], [], []
    for k in range(order + 1):
        pairs = ((0, 0), (1, 1)) if k % 2 == 0 else ((0, 1), (1, 0))
        for i, j in pairs:
            ks.append(k)
            iis.append(i)
            jjs.append(j)
    return np.array(ks), np.array(iis), np.array(jjs)


def _equation_index(order, nh):
    ds, iis, jjs = [], [], []
    for d in range(-nh, order + nh + 1):
        pairs = ((0, 0), (1, 1)) if d % 2 == 0 else ((0, 1), (1, 0))
        for i, j in pairs:
            ds.append(d)
            iis.append(i)
            jjs.append(j)
    return np.array(ds), np.array(iis), np.array(jjs)


def _assemble(Hc, order, nh):
    """Complex linear (A) and antilinear (B) blocks of tau_hat(V) - V H."""
    ku, iu, ju = _unknown_index(order)
    de, ie, je = _equation_index(order, nh)
    nE, nU = de.size, ku.size
    deg = de[:, None] - ku[None, :]
    mask = (np.abs(deg) <= nh) & (ie[:, None] == iu[None, :])
    A = np.zeros((nE, nU), dtype=complex)
    rows, cols = np.nonzero(mask)
    A[rows, cols] = -Hc[deg[rows, cols] + nh, ju[cols], je[rows]]
    B = np.zeros((nE, nU), dtype=complex)
    hit = ((ku[None, :] == -de[:, None])
           & (iu[None, :] == 1 - ie[:, None])
           & (ju[None, :] == 1 - je[:, None]))
    B[hit] = 1.0
    return A, B


def _real_system(A, B):
    """Real form of A x + B conj(x) = 0 acting on [Re x; Im x]."""
    top = np.hstack([np.real(A + B), -np.imag(A - B)])
    bot = np.hstack([np.imag(A + B), np.real(A - B)])
    return np.vstack([top, bot])


def iwasawa_decompose(C: LoopMatrix, tol=1e-8, order=None) -> IwasawaResult:
    """Normalized SU(1,1) Iwasawa factors of a twisted det-1 loop.

    ``order`` (default: the loop's own) sets the V+ truncation; passing
    2N re-solves in the refined space for truncation checks.
    """
    if order is None:
        order = C.order
    Cw = C.truncated(order) if order != C.order else C
    nh = 2 * order
    H = Cw.inverse(order=nh).mul(Cw.tau_hat(order=nh).truncated(nh))
    Hc = H.truncated(nh).coeffs
    A, B = _assemble(Hc, order, nh)
    M = _real_system(A, B)
    nU = A.shape[1]
    pin = 0  # the (V_0)_{00} unknown comes first by construction
    keep = [c for c in range(2 * nU) if c != pin and c != pin + nU]
    rhs = -M[:, pin]  # Re((V_0)_{00}) = 1, Im = 0
    sol, _, _, svals = np.linalg.lstsq(M[:, keep], rhs, rcond=None)
    cond = float(svals[0] / svals[-1]) if svals[-1] > 0 else np.inf
    x = np.zeros(2 * nU)
    x[pin] = 1.0
    x[keep] = sol
    values = x[:nU] + 1j * x[nU:]

    ku, iu, ju = _unknown_index(order)
    Vc = np.zeros((2 * order + 1, 2, 2), dtype=complex)
    Vc[ku + order, iu, ju] = values
    delta = Vc[order, 1, 1]  # det V0 with the pinned entry
    reason = ""
    ok = True
    if cond > BIG_CELL_COND:
        ok, reason = False, f"condition estimate {cond:.2e} above threshold"
    if ok and (np.real(delta) <= 0
               or abs(np.imag(delta)) > 0.1 * np.real(delta) + 1e-6):
        ok, reason = False, f"leading determinant {delta:.3e} not positive"
    scale = np.sqrt(abs(np.real(delta))) if np.real(delta) > 0 else 1.0
    Vc = Vc / scale
    Vplus = LoopMatrix(Vc, twisted=True)
    v0 = (float(np.real(Vc[order, 0, 0])), float(np.real(Vc[order, 1, 1])))
    if ok and min(v0) < MIN_LEADING:
        ok, reason = False, f"leading term {v0} below positivity floor"

    F = Cw.mul(Vplus.inverse(order=order))
    rec = (F.mul(Vplus) - Cw).wiener_norm() / (1.0 + Cw.wiener_norm())
    real = (F.tau_hat() - F).wiener_norm() / (1.0 + F.wiener_norm())
    if ok and max(rec, real) > max(tol, 1e2 * np.finfo(float).eps * cond):
        ok, reason = False, (f"residuals ({rec:.2e}, {real:.2e}) above "
                             f"tolerance {tol:.1e}")
    return IwasawaResult(F=F, Vplus=Vplus, residual_reconstruction=rec,
                         residual_reality=real, v0=v0,
                         condition_estimate=cond, ok=ok, reason=reason)


@dataclass(frozen=True)
class IwasawaGrid:
    """Per-point decompositions of a frame field's relative loops."""

    F: np.ndarray       # (ny, nx, 2N+1, 2, 2) tau-real factors
    Vplus: np.ndarray   # (ny, nx, 2N+1, 2, 2)
    rec_residual: np.ndarray
    real_residual: np.ndarray
    condition: np.ndarray
    ok: np.ndarray

    def result_at(self, iy, ix):
        return (LoopMatrix(self.F[iy, ix], twisted=True),
                LoopMatrix(self.Vplus[iy, ix], twisted=True))


def _worker_count():
    env = os.environ.get("NILCYL_THREADS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def frame_from(field, tol=1e-8) -> IwasawaGrid:
    """Decompose every valid grid point of a FrameField.

    The row on the real axis is the identity by construction and is
    fast-pathed; other points run the full solver.  Points flagged
    outside the big cell stay marked without affecting neighbors.
    Work is fanned out over rows; NILCYL_THREADS caps the pool.
    """
    ny, nx = field.valid.shape
    K = field.C_rel.shape[2]
    order = (K - 1) // 2
    F = np.full_like(field.C_rel, np.nan)
    V = np.full_like(field.C_rel, np.nan)
    rec = np.full((ny, nx), np.nan)
    real = np.full((ny, nx), np.nan)
    cond = np.full((ny, nx), np.nan)
    ok = np.zeros((ny, nx), dtype=bool)

    ident = identity(order).coeffs

    def do_row(iy):
        y_is_axis = abs(field.ys[iy]) <= 1e-15
        for ix in range(nx):
            if not field.valid[iy, ix]:
                continue
            if y_is_axis:
                F[iy, ix] = field.C_rel[iy, ix]
                V[iy, ix] = ident
                rec[iy, ix] = 0.0
                real[iy, ix] = 0.0
                cond[iy, ix] = 1.0
                ok[iy, ix] = True
                continue
            res = iwasawa_decompose(field.rel_loop(iy, ix), tol=tol)
            F[iy, ix] = res.F.truncated(order).coeffs
            V[iy, ix] = res.Vplus.truncated(order).coeffs
            rec[iy, ix] = res.residual_reconstruction
            real[iy, ix] = res.residual_reality
            cond[iy, ix] = res.condition_estimate
            ok[iy, ix] = res.ok

    workers = _worker_count()
    if workers > 1 and ny > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(do_row, range(ny)))
    else:
        for iy in range(ny):
            do_row(iy)
    return IwasawaGrid(F=F, Vplus=V, rec_residual=rec, real_residual=real,
                       condition=cond, ok=ok)
