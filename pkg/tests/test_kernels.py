"""Parity between the compiled kernel and the numpy reference."""

import numpy as np
import pytest

from nilcyl import _kernel_py
from nilcyl.kernels import BACKEND, rk4_laurent

try:
    from nilcyl import _speedup
except ImportError:
    _speedup = None


def random_problem(rng, B=3, order=6, nsteps=32):
    K = 2 * order + 1
    C0 = np.zeros((B, K, 2, 2), dtype=complex)
    C0[:, order] = np.eye(2)
    Z = 0.3 * (rng.standard_normal((2 * nsteps + 1, B, 3, 2, 2))
               + 1j * rng.standard_normal((2 * nsteps + 1, B, 3, 2, 2)))
    return C0, Z


def test_backend_is_exposed():
    assert BACKEND in ("compiled", "python")


@pytest.mark.skipif(_speedup is None, reason="extension not built")
def test_compiled_matches_reference(rng):
    C0, Z = random_problem(rng)
    h, u = 0.01, 1.0 + 0.0j
    ref, tail_ref = _kernel_py.rk4_laurent(C0, Z, h, u, 4)
    fast, tail_fast = _speedup.rk4_laurent(C0, Z, h, u, 4)
    assert np.abs(ref - fast).max() < 1e-13
    assert np.abs(tail_ref - tail_fast).max() < 1e-13


@pytest.mark.skipif(_speedup is None, reason="extension not built")
def test_compiled_matches_reference_vertical(rng):
    C0, Z = random_problem(rng, B=2, order=4, nsteps=16)
    ref, _ = _kernel_py.rk4_laurent(C0, Z, 0.02, 1j, 1)
    fast, _ = _speedup.rk4_laurent(C0, Z, 0.02, 1j, 1)
    assert np.abs(ref - fast).max() < 1e-13


def test_save_every_divisibility(rng):
    C0, Z = random_problem(rng, nsteps=10)
    with pytest.raises(ValueError):
        rk4_laurent(C0, Z, 0.01, 1.0 + 0j, 3)


def test_truncation_tail_counts_dropped_mass(rng):
    """A top-degree coefficient pushed over the edge lands in the tail."""
    order, nsteps = 2, 4
    K = 2 * order + 1
    C0 = np.zeros((1, K, 2, 2), dtype=complex)
    C0[0, order] = np.eye(2)
    C0[0, -1] = 0.5 * np.eye(2)  # degree +2 occupied
    Z = np.zeros((2 * nsteps + 1, 1, 3, 2, 2), dtype=complex)
    Z[:, :, 2] = np.eye(2)  # pure lambda^{+1} symbol
    _, tail = rk4_laurent(C0, Z, 0.1, 1.0 + 0j, nsteps)
    assert tail[0] > 0
