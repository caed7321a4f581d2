"""Independent reference implementations used only by the tests."""

import math

import numpy as np


def liouvillian(H, collapse):
    """Explicit superoperator on column-stacked vec(rho).

    Uses vec(A X B) = (B^T kron A) vec(X).
    """
    n = H.shape[0]
    eye = np.eye(n)
    L = -1j * (np.kron(eye, H) - np.kron(H.T, eye))
    for c in collapse:
        cdc = c.conj().T @ c
        L += np.kron(c.conj(), c) - 0.5 * np.kron(eye, cdc) - 0.5 * np.kron(cdc.T, eye)
    return L


def apply_liouvillian(L, rho):
    n = rho.shape[0]
    return (L @ rho.reshape(-1, order="F")).reshape(n, n, order="F")


def random_hermitian(rng, n, scale=1.0):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (a + a.conj().T) / 2


def random_density(rng, n, rank=None):
    rank = n if rank is None else rank
    g = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def ladder(dim):
    return np.diag(np.sqrt(np.arange(1, dim)), 1).astype(complex)


def tmsv_covariance_vacuum(r):
    """Two-mode squeezed vacuum in vacuum units, (X1, Y1, X2, Y2) order."""
    c, s = math.cosh(2 * r), math.sinh(2 * r)
    z = np.diag([1.0, -1.0])
    return np.block([[c * np.eye(2), s * z], [s * z, c * np.eye(2)]])


def g_vacuum(x):
    """Entropy of a vacuum-unit symplectic eigenvalue, written out directly."""
    if abs(x - 1.0) < 1e-15:
        return 0.0
    p, m = (x + 1) / 2, (x - 1) / 2
    return p * math.log2(p) - m * math.log2(m)


def bose_einstein(f, t):
    if t == 0:
        return 0.0
    h, kb = 6.62607015e-34, 1.380649e-23
    return 1.0 / (math.exp(h * f / (kb * t)) - 1.0)
