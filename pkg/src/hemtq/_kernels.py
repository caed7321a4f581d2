"""Compiled RK4 propagation of the Lindblad matrix ODE.

The generator is applied as ``-i (K X - X K^H) + sum_n c_n X c_n^H`` with the
effective non-Hermitian Hamiltonian ``K = H - (i/2) sum_n c_n^H c_n``.
Collapse operators with at most one entry per row (ladder operators embedded
in a product space) use an index/weight encoding; any other collapse
operator goes through dense products.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _rhs(K, KH, cidx, cw, cden, cdenH, X, out, tmp, tmp2, hermitian):
    D = X.shape[0]
    np.dot(K, X, tmp)
    if hermitian:
        for i in range(D):
            for j in range(D):
                out[i, j] = -1j * tmp[i, j] + 1j * np.conj(tmp[j, i])
    else:
        for i in range(D):
            for j in range(D):
                out[i, j] = -1j * tmp[i, j]
        np.dot(X, KH, tmp)
        for i in range(D):
            for j in range(D):
                out[i, j] += 1j * tmp[i, j]
    for c in range(cidx.shape[0]):
        for i in range(D):
            p = cidx[c, i]
            if p < 0:
                continue
            wi = cw[c, i]
            for j in range(D):
                q = cidx[c, j]
                if q < 0:
                    continue
                out[i, j] += wi * np.conj(cw[c, j]) * X[p, q]
    for c in range(cden.shape[0]):
        np.dot(cden[c], X, tmp)
        np.dot(tmp, cdenH[c], tmp2)
        for i in range(D):
            for j in range(D):
                out[i, j] += tmp2[i, j]


@njit(cache=True)
def rhs(K, cidx, cw, cden, X, hermitian):
    """Single generator evaluation (used by tests and relaxation checks)."""
    KH = np.ascontiguousarray(K.conj().T)
    cdenH = np.empty_like(cden)
    for c in range(cden.shape[0]):
        cdenH[c] = cden[c].conj().T
    out = np.empty_like(X)
    tmp = np.empty_like(X)
    tmp2 = np.empty_like(X)
    _rhs(K, KH, cidx, cw, cden, cdenH, X, out, tmp, tmp2, hermitian)
    return out


@njit(cache=True)
def rk4_propagate(K, cidx, cw, cden, X, h, nsteps, hermitian):
    """Advance ``X`` in place by ``nsteps`` classical RK4 steps of size ``h``."""
    KH = np.ascontiguousarray(K.conj().T)
    cdenH = np.empty_like(cden)
    for c in range(cden.shape[0]):
        cdenH[c] = cden[c].conj().T
    D = X.shape[0]
    k = np.empty_like(X)
    acc = np.empty_like(X)
    Y = np.empty_like(X)
    tmp = np.empty_like(X)
    tmp2 = np.empty_like(X)
    half = 0.5 * h
    sixth = h / 6.0
    for _ in range(nsteps):
        _rhs(K, KH, cidx, cw, cden, cdenH, X, k, tmp, tmp2, hermitian)
        for i in range(D):
            for j in range(D):
                acc[i, j] = k[i, j]
                Y[i, j] = X[i, j] + half * k[i, j]
        _rhs(K, KH, cidx, cw, cden, cdenH, Y, k, tmp, tmp2, hermitian)
        for i in range(D):
            for j in range(D):
                acc[i, j] += 2.0 * k[i, j]
                Y[i, j] = X[i, j] + half * k[i, j]
        _rhs(K, KH, cidx, cw, cden, cdenH, Y, k, tmp, tmp2, hermitian)
        for i in range(D):
            for j in range(D):
                acc[i, j] += 2.0 * k[i, j]
                Y[i, j] = X[i, j] + h * k[i, j]
        _rhs(K, KH, cidx, cw, cden, cdenH, Y, k, tmp, tmp2, hermitian)
        for i in range(D):
            for j in range(D):
                X[i, j] += sixth * (acc[i, j] + k[i, j])
    return X


def encode_collapse(matrices, dim):
    """Split collapse matrices into monomial (index, weight) and dense stacks."""
    idx, w, dense = [], [], []
    for m in matrices:
        if np.count_nonzero(m, axis=1).max(initial=0) <= 1:
            cols = np.full(dim, -1, dtype=np.int64)
            weights = np.zeros(dim, dtype=np.complex128)
            rows, cs = np.nonzero(m)
            cols[rows] = cs
            weights[rows] = m[rows, cs]
            idx.append(cols)
            w.append(weights)
        else:
            dense.append(np.ascontiguousarray(m, dtype=np.complex128))
    cidx = np.array(idx, dtype=np.int64).reshape(len(idx), dim)
    cw = np.array(w, dtype=np.complex128).reshape(len(w), dim)
    cden = np.array(dense, dtype=np.complex128).reshape(len(dense), dim, dim)
    return cidx, cw, cden
