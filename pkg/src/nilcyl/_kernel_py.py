"""Reference numpy implementation of the hot integration kernel.

The compiled twin lives in ``nilcyl._speedup``; both expose the same
``rk4_laurent`` signature and must stay numerically identical (same
operation order up to floating point associativity of the vectorized
matmuls).  ``nilcyl.kernels`` picks one at import time.
"""

import numpy as np

BACKEND = "python"


def laurent_step_product(C, Z):
    """Multiply Laurent coefficients C by a degree-(-1,0,1) symbol Z.

    C has shape (B, K, 2, 2) with K = 2N+1 coefficient matrices per
    trajectory; Z has shape (B, 3, 2, 2) holding the lambda-degree
    -1, 0, +1 matrices.  Returns the product truncated back to K
    coefficients (the degree N+1 and -N-1 terms are dropped).
    """
    R = C @ Z[:, None, 1]
    R[:, :-1] += C[:, 1:] @ Z[:, None, 0]
    R[:, 1:] += C[:, :-1] @ Z[:, None, 2]
    return R


def _dropped(C, Z):
    # Wiener norm of the two truncated coefficients (degrees N+1, -N-1).
    hi = np.abs(C[:, -1] @ Z[:, 2]).sum(axis=(1, 2))
    lo = np.abs(C[:, 0] @ Z[:, 0]).sum(axis=(1, 2))
    return hi + lo


def rk4_laurent(C0, Z, h, u, save_every):
    """Propagate dC/ds = u * C * zeta(s) with classical RK4.

    Parameters
    ----------
    C0 : (B, K, 2, 2) complex
        Initial Laurent coefficients per trajectory.
    Z : (2*nsteps+1, B, 3, 2, 2) complex
        Potential symbol sampled on the half-step grid along the path.
    h : float
        Step in the path parameter s.
    u : complex
        Path direction dz/ds (1 along the real axis, 1j vertically).
    save_every : int
        Record the state after every ``save_every`` steps; nsteps must
        be a multiple of it.

    Returns
    -------
    saved : (nsteps // save_every + 1, B, K, 2, 2) complex
        Trajectory snapshots, ``saved[0]`` being ``C0``.
    tail : (B,) float
        Accumulated Wiener norm of coefficients lost to truncation.
    """
    C0 = np.asarray(C0, dtype=complex)
    Z = np.asarray(Z, dtype=complex)
    nsteps = (Z.shape[0] - 1) // 2
    if nsteps % save_every != 0:
        raise ValueError("nsteps must be divisible by save_every")
    B, K = C0.shape[0], C0.shape[1]
    saved = np.empty((nsteps // save_every + 1, B, K, 2, 2), dtype=complex)
    saved[0] = C0
    tail = np.zeros(B)
    C = C0.copy()
    w = u * h
    for step in range(nsteps):
        Z0 = Z[2 * step]
        Zh = Z[2 * step + 1]
        Z1 = Z[2 * step + 2]
        k1 = laurent_step_product(C, Z0)
        k2 = laurent_step_product(C + 0.5 * w * k1, Zh)
        k3 = laurent_step_product(C + 0.5 * w * k2, Zh)
        k4 = laurent_step_product(C + w * k3, Z1)
        tail += (abs(w) / 6.0) * (
            _dropped(C, Z0)
            + 2.0 * _dropped(C + 0.5 * w * k1, Zh)
            + 2.0 * _dropped(C + 0.5 * w * k2, Zh)
            + _dropped(C + w * k3, Z1)
        )
        C = C + (w / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if (step + 1) % save_every == 0:
            saved[(step + 1) // save_every] = C
    return saved, tail
