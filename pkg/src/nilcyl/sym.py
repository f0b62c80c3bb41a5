"""Sym-type formulas: from extended frames to surfaces.

With the extended frame F the spacelike CMC immersion in Minkowski
3-space and its Gauss map are

    f_L3 = -i lambda (dF/dlambda) F^{-1} - (i/2) Ad(F) sigma3,
    N    = (i/2) Ad(F) sigma3,

and the minimal immersion in the Heisenberg group comes from

    fhat = (f_L3)^o - (i/2) lambda (d/dlambda f_L3)^d,

taking the off-diagonal part and the lambda-derivative of the diagonal
part.  Both values lie in su(1,1) on the unit circle:
[[i a, b], [conj b, -i a]] with a real.  The coordinate identifications
used throughout are fixed:

    Heisenberg (exponential coordinates):
        x1 = 2 Re fhat_12, x2 = 2 Im fhat_12, x3 = -2 Im fhat_11;
    Minkowski (x1, x2, x0) with metric dx1^2 + dx2^2 - dx0^2:
        (Re b, Im b, a).

Grid evaluation combines the pointwise base data of the frame field
with the column-relative tau-real factors, so only the lambda-value and
first two lambda-derivatives of each factor are ever needed; the closure
of a cylinder, det N = 1/4, and the su(1,1) structure residuals are all
measured on the resulting mesh.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .loops import LoopMatrix, sigma3_loop

__all__ = [
    "SurfacePoint", "SurfaceMesh", "sym_L3", "sym_nil", "minkowski_coords",
    "surface_grid", "closure_residual", "mean_curvature_field",
]

SIGMA3 = np.diag([1.0 + 0j, -1.0 + 0j])


@dataclass(frozen=True)
class SurfacePoint:
    coords: tuple
    valid: bool = True
    gauss: Optional[tuple] = None


def _check_unit(lam):
    lam = complex(lam)
    if abs(abs(lam) - 1.0) > 1e-12:
        raise ValueError(f"|lambda| must be 1, got {abs(lam)}")
    return lam


def sym_L3(F: LoopMatrix, lam=1.0):
    """Immersion and Gauss-map matrices from a tau-real loop.

    Series route (exact lambda-derivative on coefficients); suitable
    for loops representable at their truncation order.
    """
    lam = _check_unit(lam)
    Finv = F.inverse()
    D = F.lambda_d_lambda().mul(Finv)
    S = F.mul(sigma3_loop(0)).mul(Finv)
    f = -1j * D.eval_at(lam) - 0.5j * S.eval_at(lam)
    N = 0.5j * S.eval_at(lam)
    return f, N


def sym_nil(F: LoopMatrix, lam=1.0) -> SurfacePoint:
    """Heisenberg-group point from a tau-real loop (series route)."""
    lam = _check_unit(lam)
    Finv = F.inverse()
    D = F.lambda_d_lambda().mul(Finv)
    S = F.mul(sigma3_loop(0)).mul(Finv)
    fseries = -1j * D - 0.5j * S
    fhat_series = (fseries.offdiag_part()
                   - 0.5j * fseries.diag_part().lambda_d_lambda())
    fhat = fhat_series.eval_at(lam)
    if not np.isfinite(fhat).all():
        return SurfacePoint(coords=(np.nan,) * 3, valid=False)
    return SurfacePoint(coords=_nil_coords(fhat))


def _nil_coords(fhat):
    return (2.0 * float(np.real(fhat[..., 0, 1])),
            2.0 * float(np.imag(fhat[..., 0, 1])),
            -2.0 * float(np.imag(fhat[..., 0, 0])))


def minkowski_coords(X):
    """(x1, x2, x0) of an su(1,1) matrix [[ia, b], [conj b, -ia]]."""
    b = 0.5 * (X[..., 0, 1] + np.conj(X[..., 1, 0]))
    a = 0.5 * (np.imag(X[..., 0, 0]) - np.imag(X[..., 1, 1]))
    return np.stack([np.real(b), np.imag(b), a], axis=-1)


def _inv2(A):
    det = A[..., 0, 0] * A[..., 1, 1] - A[..., 0, 1] * A[..., 1, 0]
    out = np.empty_like(A)
    out[..., 0, 0] = A[..., 1, 1]
    out[..., 1, 1] = A[..., 0, 0]
    out[..., 0, 1] = -A[..., 0, 1]
    out[..., 1, 0] = -A[..., 1, 0]
    return out / det[..., None, None]


def _su11_structure_residual(X):
    """Deviation from [[i a, b], [conj b, -i a]] with a real."""
    return (np.abs(np.real(X[..., 0, 0]))
            + np.abs(np.real(X[..., 1, 1]))
            + np.abs(X[..., 1, 0] - np.conj(X[..., 0, 1])))


@dataclass(frozen=True)
class SurfaceMesh:
    """Rectangular surface samples with per-vertex validity."""

    xs: np.ndarray
    ys: np.ndarray
    vertices: np.ndarray       # (ny, nx, 3)
    valid: np.ndarray          # (ny, nx)
    target: str
    lam: complex
    gauss: Optional[np.ndarray] = None
    metric_degenerate: Optional[np.ndarray] = None
    su11_residual: float = np.nan
    det_gauss_residual: float = np.nan

    @property
    def shape(self):
        return self.vertices.shape[:2]

    def quad_faces(self):
        """1-based vertex index quadruples over fully valid 2x2 blocks."""
        ny, nx = self.shape
        faces = []
        for iy in range(ny - 1):
            for ix in range(nx - 1):
                if (self.valid[iy, ix] and self.valid[iy, ix + 1]
                        and self.valid[iy + 1, ix + 1]
                        and self.valid[iy + 1, ix]):
                    base = iy * nx + ix
                    faces.append((base + 1, base + 2,
                                  base + nx + 2, base + nx + 1))
        return faces


def surface_grid(field, iwa, target="nil", metric_atol=1e-10):
    """Evaluate the Sym formula over a frame field.

    ``field`` supplies the pointwise base data at its lambda and the
    column-relative loops; ``iwa`` the tau-real factors of the latter.
    """
    if target not in ("nil", "L3"):
        raise ValueError(f"unknown target {target!r}")
    lam = _check_unit(field.lam)
    order = field.order
    k = np.arange(-order, order + 1)
    P0 = lam ** k
    P1 = k * lam ** (k - 1)
    P2 = k * (k - 1) * lam ** (k - 2)
    Fc = np.nan_to_num(iwa.F, nan=0.0)
    Fr = np.tensordot(Fc, P0, axes=(2, 0))
    Fr1 = np.tensordot(Fc, P1, axes=(2, 0))
    Fr2 = np.tensordot(Fc, P2, axes=(2, 0))
    G = field.base[None, :, 0]
    G1 = field.base[None, :, 1]
    G2 = field.base[None, :, 2]
    F = G @ Fr
    F1 = G1 @ Fr + G @ Fr1
    F2 = G2 @ Fr + 2.0 * (G1 @ Fr1) + G @ Fr2
    Finv = _inv2(F)
    A = F1 @ Finv
    B = F2 @ Finv
    S = F @ SIGMA3[None, None] @ Finv
    fL3 = -1j * lam * A - 0.5j * S
    N = 0.5j * S
    valid = field.valid & iwa.ok

    su11_res = 0.0
    if valid.any():
        su11_res = float(max(_su11_structure_residual(fL3)[valid].max(),
                             _su11_structure_residual(N)[valid].max()))
    detN = (N[..., 0, 0] * N[..., 1, 1] - N[..., 0, 1] * N[..., 1, 0])
    det_res = float(np.abs(detN - 0.25)[valid].max()) if valid.any() else np.nan

    if target == "nil":
        dfL3 = (-1j * (A + lam * B - lam * (A @ A))
                - 0.5j * (A @ S - S @ A))
        fhat = fL3.copy()
        fhat[..., 0, 0] = -0.5j * lam * dfL3[..., 0, 0]
        fhat[..., 1, 1] = -0.5j * lam * dfL3[..., 1, 1]
        verts = np.stack([2.0 * np.real(fhat[..., 0, 1]),
                          2.0 * np.imag(fhat[..., 0, 1]),
                          -2.0 * np.imag(fhat[..., 0, 0])], axis=-1)
        gauss = None
    else:
        verts = minkowski_coords(fL3)
        gauss = minkowski_coords(N)
    valid = valid & np.isfinite(verts).all(axis=-1)
    verts = np.where(valid[..., None], verts, np.nan)

    # branch-point diagnostic: the lambda^{-1} off-diagonal product of the
    # frame's Maurer-Cartan form equals h (kappa* - h*) independently of
    # the Iwasawa factor, so it is evaluated directly from the potential
    pot = field.pot
    hstar = pot.h.conj_reflect()
    kstar = pot.kappa.conj_reflect()
    zs = field.xs[None, :] + 1j * field.ys[:, None]
    prod = pot.h(zs) * (kstar(zs) - hstar(zs))
    scale = np.nanmax(np.abs(prod)) if np.isfinite(prod).any() else 1.0
    degenerate = np.abs(prod) <= metric_atol * (1.0 + scale)

    return SurfaceMesh(xs=field.xs, ys=field.ys, vertices=verts, valid=valid,
                       target=target, lam=lam, gauss=gauss,
                       metric_degenerate=degenerate,
                       su11_residual=su11_res, det_gauss_residual=det_res)


def closure_residual(mesh: SurfaceMesh):
    """max over rows of |f(last column) - f(first column)|.

    Meaningful when the grid spans exactly the (n-fold) period, so the
    first and last columns sample z and z + np.
    """
    ok = mesh.valid[:, 0] & mesh.valid[:, -1]
    if not ok.any():
        return np.nan
    diff = mesh.vertices[ok, -1] - mesh.vertices[ok, 0]
    return float(np.linalg.norm(diff, axis=-1).max())


def _mink_dot(u, v):
    return (u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1]
            - u[..., 2] * v[..., 2])


def _d_dx(field, xs, closure_ok):
    """Derivative along the periodic x direction.

    The grid spans exactly one horizontal period inclusive of both
    endpoints; when the surface closes, the row data are periodic over
    the first nx-1 columns and spectral differentiation is exact.  A
    non-closing (frame-periodic-only) surface falls back to second-order
    central differences.
    """
    nx = xs.size
    dx = xs[1] - xs[0]
    if closure_ok:
        span = xs[-1] - xs[0]
        data = field[:, :-1]
        spec = np.fft.fft(data, axis=1)
        kk = np.fft.fftfreq(nx - 1, d=1.0 / (nx - 1))
        if (nx - 1) % 2 == 0:
            kk[(nx - 1) // 2] = 0.0
        dspec = spec * (2j * np.pi / span * kk)[None, :, None]
        der = np.real(np.fft.ifft(dspec, axis=1))
        return np.concatenate([der, der[:, :1]], axis=1)
    out = np.full_like(field, np.nan)
    out[:, 1:-1] = (field[:, 2:] - field[:, :-2]) / (2 * dx)
    return out


def _d_dy(field, ys):
    """Fourth-order derivative across rows (second order if ny < 5).

    Rows without the full fourth-order stencil are left NaN: the
    low-order boundary estimate is an order of magnitude noisier and
    would dominate any constancy measurement.
    """
    dy = ys[1] - ys[0]
    out = np.full_like(field, np.nan)
    if field.shape[0] >= 5:
        out[2:-2] = (-field[4:] + 8.0 * field[3:-1]
                     - 8.0 * field[1:-3] + field[:-4]) / (12 * dy)
    else:
        out[1:-1] = (field[2:] - field[:-2]) / (2 * dy)
    return out


def mean_curvature_field(mesh: SurfaceMesh):
    """Discrete Minkowski mean curvature at interior vertices.

    Differentiates the immersion and the exact unit normal (2 N,
    timelike) on the parameter grid; second-fundamental entries use
    <f_u, n_u>, so only first derivatives of the mesh fields enter.
    Returns (values, mask) over the interior grid.
    """
    if mesh.gauss is None:
        raise ValueError("mean curvature needs the Gauss map (L3 target)")
    f = mesh.vertices
    n = 2.0 * mesh.gauss
    scale = np.nanmax(np.abs(f)) + 1.0
    closure_ok = (mesh.valid.all()
                  and closure_residual(mesh) < 1e-6 * scale)
    fu, nu = _d_dx(f, mesh.xs, closure_ok), _d_dx(n, mesh.xs, closure_ok)
    fv, nv = _d_dy(f, mesh.ys), _d_dy(n, mesh.ys)
    E = _mink_dot(fu, fu)
    Ff = _mink_dot(fu, fv)
    Gg = _mink_dot(fv, fv)
    e = -_mink_dot(fu, nu)
    m = -0.5 * (_mink_dot(fu, nv) + _mink_dot(fv, nu))
    g = -_mink_dot(fv, nv)
    denom = 2.0 * (E * Gg - Ff ** 2)
    with np.errstate(invalid="ignore", divide="ignore"):
        H = (E * g - 2.0 * Ff * m + Gg * e) / denom
    H = H[1:-1, 1:-1]
    denom = denom[1:-1, 1:-1]
    mask = (mesh.valid[1:-1, 2:] & mesh.valid[1:-1, :-2]
            & mesh.valid[2:, 1:-1] & mesh.valid[:-2, 1:-1]
            & mesh.valid[1:-1, 1:-1] & np.isfinite(H)
            & (np.abs(denom) > 1e-12))
    return H, mask
