# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of nilcyl._kernel_py (see that module for the contract)."""

import numpy as np

cimport cython
cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"

ctypedef double complex cplx


cdef inline void _mul(cplx[:, :, ::1] C, cplx[:, :, ::1] Z,
                      cplx[:, :, ::1] out, Py_ssize_t K) noexcept nogil:
    # out[k] = C[k+1] Z[-1] + C[k] Z[0] + C[k-1] Z[+1], truncated to K terms
    cdef Py_ssize_t k, i, j
    cdef cplx acc
    for k in range(K):
        for i in range(2):
            for j in range(2):
                acc = C[k, i, 0] * Z[1, 0, j] + C[k, i, 1] * Z[1, 1, j]
                if k + 1 < K:
                    acc = acc + C[k + 1, i, 0] * Z[0, 0, j] + C[k + 1, i, 1] * Z[0, 1, j]
                if k >= 1:
                    acc = acc + C[k - 1, i, 0] * Z[2, 0, j] + C[k - 1, i, 1] * Z[2, 1, j]
                out[k, i, j] = acc


cdef inline double _dropped(cplx[:, :, ::1] C, cplx[:, :, ::1] Z,
                            Py_ssize_t K) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double s = 0.0
    cdef cplx hi, lo
    for i in range(2):
        for j in range(2):
            hi = C[K - 1, i, 0] * Z[2, 0, j] + C[K - 1, i, 1] * Z[2, 1, j]
            lo = C[0, i, 0] * Z[0, 0, j] + C[0, i, 1] * Z[0, 1, j]
            s += abs(hi) + abs(lo)
    return s


cdef inline void _axpy(cplx[:, :, ::1] out, cplx[:, :, ::1] C, cplx a,
                       cplx[:, :, ::1] k, Py_ssize_t K) noexcept nogil:
    cdef Py_ssize_t m, i, j
    for m in range(K):
        for i in range(2):
            for j in range(2):
                out[m, i, j] = C[m, i, j] + a * k[m, i, j]


def rk4_laurent(C0, Z, double h, u, Py_ssize_t save_every):
    """See nilcyl._kernel_py.rk4_laurent."""
    C0 = np.ascontiguousarray(C0, dtype=complex)
    Z = np.ascontiguousarray(Z, dtype=complex)
    cdef Py_ssize_t nsteps = (Z.shape[0] - 1) // 2
    if nsteps % save_every != 0:
        raise ValueError("nsteps must be divisible by save_every")
    cdef Py_ssize_t B = C0.shape[0]
    cdef Py_ssize_t K = C0.shape[1]
    saved_np = np.empty((nsteps // save_every + 1, B, K, 2, 2), dtype=complex)
    saved_np[0] = C0
    tail_np = np.zeros(B)
    work = np.empty((6, K, 2, 2), dtype=complex)

    cdef cplx[:, :, :, ::1] Cv = C0
    cdef cplx[:, :, :, :, ::1] Zv = Z
    cdef cplx[:, :, :, :, ::1] saved = saved_np
    cdef double[::1] tail = tail_np
    cdef cplx[:, :, :, ::1] wk = work
    cdef cplx w = u * h
    cdef cplx w6 = w / 6.0
    cdef Py_ssize_t b, step, m, i, j
    cdef double drop

    with nogil:
        for b in range(B):
            for step in range(nsteps):
                # wk: 0=k1 1=k2 2=k3 3=k4 4=stage state 5=current C
                if step == 0:
                    for m in range(K):
                        for i in range(2):
                            for j in range(2):
                                wk[5, m, i, j] = Cv[b, m, i, j]
                drop = 0.0
                _mul(wk[5], Zv[2 * step, b], wk[0], K)
                drop += _dropped(wk[5], Zv[2 * step, b], K)
                _axpy(wk[4], wk[5], 0.5 * w, wk[0], K)
                _mul(wk[4], Zv[2 * step + 1, b], wk[1], K)
                drop += 2.0 * _dropped(wk[4], Zv[2 * step + 1, b], K)
                _axpy(wk[4], wk[5], 0.5 * w, wk[1], K)
                _mul(wk[4], Zv[2 * step + 1, b], wk[2], K)
                drop += 2.0 * _dropped(wk[4], Zv[2 * step + 1, b], K)
                _axpy(wk[4], wk[5], w, wk[2], K)
                _mul(wk[4], Zv[2 * step + 2, b], wk[3], K)
                drop += _dropped(wk[4], Zv[2 * step + 2, b], K)
                tail[b] += drop * abs(w) / 6.0
                for m in range(K):
                    for i in range(2):
                        for j in range(2):
                            wk[5, m, i, j] = wk[5, m, i, j] + w6 * (
                                wk[0, m, i, j] + 2.0 * wk[1, m, i, j]
                                + 2.0 * wk[2, m, i, j] + wk[3, m, i, j])
                if (step + 1) % save_every == 0:
                    for m in range(K):
                        for i in range(2):
                            for j in range(2):
                                saved[(step + 1) // save_every, b, m, i, j] = wk[5, m, i, j]
    return saved_np, tail_np
