"""Exact dense linear algebra over the prime field F_ell.

Matrices are immutable int64 arrays with entries reduced mod ell, wrapped in
``FpMatrix`` which pins the modulus and validates primality. Vectors are 1-d
int64 arrays; a subspace is an (n, k) array whose columns form a basis.
Everything here is pure and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import _backend


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for n < 3.3e24."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _as_int64(a) -> np.ndarray:
    arr = np.asarray(a, dtype=np.int64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-d array, got ndim={arr.ndim}")
    return arr


@dataclass(frozen=True)
class FpMatrix:
    """A rows x cols matrix over F_ell, dense row-major, entries in [0, ell)."""

    ell: int
    a: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not is_prime(self.ell):
            raise ValueError(f"modulus {self.ell} is not prime")
        arr = _as_int64(self.a) % self.ell
        arr.flags.writeable = False
        object.__setattr__(self, "a", arr)

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FpMatrix)
            and self.ell == other.ell
            and self.a.shape == other.a.shape
            and np.array_equal(self.a, other.a)
        )

    def __repr__(self):
        return f"FpMatrix(ell={self.ell}, {self.rows}x{self.cols})\n{self.a}"

    def transpose(self) -> "FpMatrix":
        return FpMatrix(self.ell, self.a.T)


def zeros(ell: int, rows: int, cols: int) -> FpMatrix:
    return FpMatrix(ell, np.zeros((rows, cols), dtype=np.int64))


def identity(ell: int, n: int) -> FpMatrix:
    return FpMatrix(ell, np.eye(n, dtype=np.int64))


def from_rows(ell: int, rows: Sequence[Sequence[int]]) -> FpMatrix:
    return FpMatrix(ell, np.array(rows, dtype=np.int64).reshape(len(rows), -1))


def mat_mul(m: FpMatrix, n: FpMatrix) -> FpMatrix:
    if m.ell != n.ell:
        raise ValueError("modulus mismatch")
    if m.cols != n.rows:
        raise ValueError(f"shape mismatch {m.rows}x{m.cols} @ {n.rows}x{n.cols}")
    return FpMatrix(m.ell, (m.a @ n.a) % m.ell)


def mat_vec(m: FpMatrix, v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=np.int64)
    if v.shape != (m.cols,):
        raise ValueError(f"vector length {v.shape} incompatible with {m.rows}x{m.cols}")
    return (m.a @ (v % m.ell)) % m.ell


def mat_pow(m: FpMatrix, e: int) -> FpMatrix:
    if m.rows != m.cols:
        raise ValueError("power of a non-square matrix")
    if e < 0:
        raise ValueError("negative exponent")
    result = np.eye(m.rows, dtype=np.int64)
    base = m.a.copy()
    while e:
        if e & 1:
            result = (result @ base) % m.ell
        base = (base @ base) % m.ell
        e >>= 1
    return FpMatrix(m.ell, result)


def rref(m: FpMatrix) -> Tuple[FpMatrix, List[int], int]:
    """Reduced row echelon form of m; returns (R, pivot columns, rank)."""
    r, piv, rk = _backend.rref(m.a, m.ell)
    return FpMatrix(m.ell, r), [int(c) for c in piv], int(rk)


def rank(m: FpMatrix) -> int:
    return int(_backend.rank(m.a, m.ell))


def kernel_basis(m: FpMatrix) -> List[np.ndarray]:
    """Basis of the right null space {x : m x = 0}, as a list of vectors."""
    ns = _backend.nullspace(m.a, m.ell)
    return [ns[:, j].copy() for j in range(ns.shape[1])]


def solve(a: FpMatrix, b: np.ndarray) -> Optional[np.ndarray]:
    """Some x with a x = b (free variables 0 in rref coordinates), else None."""
    b = np.asarray(b, dtype=np.int64)
    if b.shape != (a.rows,):
        raise ValueError(f"rhs length {b.shape} incompatible with {a.rows}x{a.cols}")
    ok, x = _backend.solve(a.a, b, a.ell)
    return x if ok else None


def invert(m: FpMatrix) -> Optional[FpMatrix]:
    if m.rows != m.cols:
        raise ValueError("inverse of a non-square matrix")
    ok, out = _backend.inv(m.a, m.ell)
    return FpMatrix(m.ell, out) if ok else None


# ---------------------------------------------------------------------------
# subspace helpers (columns = basis vectors)

def column_space(m: FpMatrix) -> FpMatrix:
    """Basis of the column space: the pivot columns of m."""
    _, piv, _ = rref(m)
    return FpMatrix(m.ell, m.a[:, piv])


def column_span_canonical(m: FpMatrix) -> np.ndarray:
    """Canonical basis of the column space (rref of the transpose, nonzero rows).

    Two column sets span the same subspace iff their canonical forms are equal.
    """
    r, _, rk = _backend.rref(m.a.T.copy(), m.ell)
    return r[:rk].copy()


def same_span(m: FpMatrix, n: FpMatrix) -> bool:
    if m.ell != n.ell or m.rows != n.rows:
        raise ValueError("spaces live in different ambient modules")
    return np.array_equal(column_span_canonical(m), column_span_canonical(n))


def in_span(m: FpMatrix, v: np.ndarray) -> bool:
    return solve(m, v) is not None


def span_contains(big: FpMatrix, small: FpMatrix) -> bool:
    """True iff every column of small lies in the column span of big."""
    if small.cols == 0:
        return True
    stacked = FpMatrix(big.ell, np.concatenate([big.a, small.a], axis=1))
    return rank(stacked) == rank(big)


def intersect_columns(m: FpMatrix, n: FpMatrix) -> FpMatrix:
    """Basis of the intersection of two column spans in the same ambient space."""
    if m.ell != n.ell or m.rows != n.rows:
        raise ValueError("spaces live in different ambient modules")
    if m.cols == 0 or n.cols == 0:
        return zeros(m.ell, m.rows, 0)
    stacked = FpMatrix(m.ell, np.concatenate([m.a, (-n.a) % m.ell], axis=1))
    vecs = []
    for w in kernel_basis(stacked):
        vecs.append((m.a @ w[: m.cols]) % m.ell)
    if not vecs:
        return zeros(m.ell, m.rows, 0)
    candidates = FpMatrix(m.ell, np.stack(vecs, axis=1))
    return column_space(candidates)
