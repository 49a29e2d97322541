"""JIT-compiled Gaussian elimination kernels over a prime field.

Same signatures as ``_kernels_numpy``; the active module is picked by
``ulmkit._backend``. All matrices are int64 with entries in [0, p).
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _inv_scalar(a, p):
    # Fermat inverse, a != 0 mod p.
    r = 1
    b = a % p
    e = p - 2
    while e > 0:
        if e & 1:
            r = (r * b) % p
        b = (b * b) % p
        e >>= 1
    return r


@njit(cache=True)
def rref(a, p):
    """Reduced row echelon form. Returns (R, pivot_cols, rank)."""
    m, n = a.shape
    r = a % p
    piv = np.empty(min(m, n), dtype=np.int64)
    row = 0
    for col in range(n):
        if row >= m:
            break
        pr = -1
        for i in range(row, m):
            if r[i, col] != 0:
                pr = i
                break
        if pr == -1:
            continue
        if pr != row:
            for j in range(n):
                t = r[row, j]
                r[row, j] = r[pr, j]
                r[pr, j] = t
        inv = _inv_scalar(r[row, col], p)
        for j in range(col, n):
            r[row, j] = (r[row, j] * inv) % p
        for i in range(m):
            if i != row and r[i, col] != 0:
                f = r[i, col]
                for j in range(col, n):
                    r[i, j] = (r[i, j] - f * r[row, j]) % p
        piv[row] = col
        row += 1
    return r, piv[:row].copy(), row


@njit(cache=True)
def rank(a, p):
    m, n = a.shape
    r = a % p
    row = 0
    for col in range(n):
        if row >= m:
            break
        pr = -1
        for i in range(row, m):
            if r[i, col] != 0:
                pr = i
                break
        if pr == -1:
            continue
        if pr != row:
            for j in range(col, n):
                t = r[row, j]
                r[row, j] = r[pr, j]
                r[pr, j] = t
        inv = _inv_scalar(r[row, col], p)
        for j in range(col, n):
            r[row, j] = (r[row, j] * inv) % p
        for i in range(row + 1, m):
            if r[i, col] != 0:
                f = r[i, col]
                for j in range(col, n):
                    r[i, j] = (r[i, j] - f * r[row, j]) % p
        row += 1
    return row


@njit(cache=True)
def nullspace(a, p):
    """Basis of the right kernel; columns of the returned (n, k) array."""
    m, n = a.shape
    r, piv, rk = rref(a, p)
    k = n - rk
    out = np.zeros((n, k), dtype=np.int64)
    is_piv = np.zeros(n, dtype=np.int64)
    for t in range(rk):
        is_piv[piv[t]] = 1
    idx = 0
    for f in range(n):
        if is_piv[f]:
            continue
        out[f, idx] = 1
        for t in range(rk):
            out[piv[t], idx] = (-r[t, f]) % p
        idx += 1
    return out


@njit(cache=True)
def solve(a, b, p):
    """One solution of a x = b, free variables 0. Returns (ok, x)."""
    m, n = a.shape
    aug = np.empty((m, n + 1), dtype=np.int64)
    aug[:, :n] = a % p
    for i in range(m):
        aug[i, n] = b[i] % p
    r, piv, rk = rref(aug, p)
    x = np.zeros(n, dtype=np.int64)
    for t in range(rk):
        if piv[t] == n:
            return False, x
        x[piv[t]] = r[t, n]
    return True, x


@njit(cache=True)
def inv(a, p):
    """Inverse of a square matrix. Returns (ok, inverse)."""
    n = a.shape[0]
    aug = np.empty((n, 2 * n), dtype=np.int64)
    aug[:, :n] = a % p
    aug[:, n:] = 0
    for i in range(n):
        aug[i, n + i] = 1
    r, piv, rk = rref(aug, p)
    out = np.zeros((n, n), dtype=np.int64)
    if rk < n:
        return False, out
    for t in range(rk):
        if piv[t] != t:
            return False, out
    out[:, :] = r[:, n:]
    return True, out
