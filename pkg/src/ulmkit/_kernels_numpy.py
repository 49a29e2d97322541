"""Pure-numpy fallback kernels, row-vectorized Gaussian elimination.

Selected with ULMKIT_BACKEND=numpy; see ``ulmkit._backend``.
"""

import numpy as np


def rref(a, p):
    """Reduced row echelon form. Returns (R, pivot_cols, rank)."""
    r = (a % p).astype(np.int64)
    m, n = r.shape
    piv = []
    row = 0
    for col in range(n):
        if row >= m:
            break
        nz = np.nonzero(r[row:, col])[0]
        if nz.size == 0:
            continue
        pr = row + int(nz[0])
        if pr != row:
            r[[row, pr]] = r[[pr, row]]
        r[row] = (r[row] * pow(int(r[row, col]), p - 2, p)) % p
        f = r[:, col].copy()
        f[row] = 0
        r -= np.outer(f, r[row])
        r %= p
        piv.append(col)
        row += 1
    return r, np.array(piv, dtype=np.int64), row


def rank(a, p):
    return rref(a, p)[2]


def nullspace(a, p):
    """Basis of the right kernel; columns of the returned (n, k) array."""
    m, n = a.shape
    r, piv, rk = rref(a, p)
    free = [j for j in range(n) if j not in set(piv.tolist())]
    out = np.zeros((n, len(free)), dtype=np.int64)
    for idx, f in enumerate(free):
        out[f, idx] = 1
        for t in range(rk):
            out[piv[t], idx] = (-r[t, f]) % p
    return out


def solve(a, b, p):
    """One solution of a x = b, free variables 0. Returns (ok, x)."""
    m, n = a.shape
    aug = np.concatenate([a % p, (np.asarray(b) % p).reshape(-1, 1)], axis=1)
    r, piv, rk = rref(aug, p)
    x = np.zeros(n, dtype=np.int64)
    for t in range(rk):
        if piv[t] == n:
            return False, x
        x[piv[t]] = r[t, n]
    return True, x


def inv(a, p):
    """Inverse of a square matrix. Returns (ok, inverse)."""
    n = a.shape[0]
    aug = np.concatenate([a % p, np.eye(n, dtype=np.int64)], axis=1)
    r, piv, rk = rref(aug, p)
    if rk < n or not np.array_equal(piv, np.arange(n)):
        return False, np.zeros((n, n), dtype=np.int64)
    return True, r[:, n:].copy()
