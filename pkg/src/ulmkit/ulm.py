"""Ulm invariants and constructive decomposition into cyclic summands.

decompose() walks the filtration level by level: inside the current invariant
complement Q it splits the fixed subspace into the part of height > N and a
complement U whose nonzero elements have height exactly N, lifts each basis
vector u of U through (sigma-1)^N, and collects the resulting chains into a
pure bounded submodule T. The invariant complement of T is built by extending
T's chain tops with greedily chosen chain tops of the nilpotent operator
(via kernels of its powers) and closing under sigma-1; every stage is verified
and the operation fails loudly on any inconsistency.

jordan_multiplicities() is the independent oracle: the multiplicity of the
size-n block of the nilpotent x = sigma-1 is rank(x^(n-1)) - 2 rank(x^n)
+ rank(x^(n+1)).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from . import _backend, linalg
from .linalg import FpMatrix
from .zmodule import ZModule


class DecompositionError(RuntimeError):
    """Internal consistency failure; signals a bug, never expected on valid input."""


def ulm_invariants(m: ZModule) -> List[int]:
    """[U_0, ..., U_(d-1)] with U_n = dim(I^n M)^Z - dim(I^(n+1) M)^Z.

    The entries sum to dim M^Z, and U_(n-1) counts the cyclic summands of
    dimension n.
    """
    d = m.dim
    if d == 0:
        return []
    ell = m.ell
    fixed = _nullspace((m.sigma.a - np.eye(d, dtype=np.int64)) % ell, ell)
    f = fixed.shape[1]
    dims = [f]  # dim(I^n M intersect M^Z) for n = 0, 1, ...
    xn = m.x.a.copy()
    for _ in range(d):
        dims.append(_intersection_dim(xn, fixed, ell))
        xn = (xn @ m.x.a) % ell
    return [dims[n] - dims[n + 1] for n in range(d)]


def jordan_multiplicities(m: ZModule) -> List[int]:
    """[mult of block size 1, ..., mult of block size d] for x = sigma - I.

    Independent of decompose(); uses only ranks of powers of x. Aligned with
    ulm_invariants: the two lists agree entrywise on every finite module.
    """
    d = m.dim
    if d == 0:
        return []
    ell = m.ell
    ranks = [d]
    xn = m.x.a.copy()
    for _ in range(d + 1):
        ranks.append(int(_backend.rank(xn, ell)))
        xn = (xn @ m.x.a) % ell
    return [ranks[n - 1] - 2 * ranks[n] + ranks[n + 1] for n in range(1, d + 1)]


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Chains realizing M as a direct sum of cyclic summands.

    parts: list of (n, [p, x p, ..., x^(n-1) p]) with vectors in ambient
    coordinates; concatenated chains form a basis. change_of_basis C satisfies
    C sigma C^(-1) = the block-diagonal unipotent matrix of the listed type.
    """

    module: ZModule
    parts: Tuple[Tuple[int, Tuple[np.ndarray, ...]], ...]
    change_of_basis: FpMatrix

    def block_sizes(self) -> Tuple[int, ...]:
        return tuple(sorted(n for n, _ in self.parts))

    def multiplicities(self) -> List[int]:
        """Same shape as jordan_multiplicities: entry n-1 is the count of size n."""
        out = [0] * self.module.dim
        for n, _ in self.parts:
            out[n - 1] += 1
        return out

    def block_diagonal(self) -> FpMatrix:
        d = self.module.dim
        a = np.zeros((d, d), dtype=np.int64)
        pos = 0
        for n, _ in self.parts:
            a[pos : pos + n, pos : pos + n] = np.eye(n, dtype=np.int64)
            for i in range(n - 1):
                a[pos + i + 1, pos + i] = 1
            pos += n
        return FpMatrix(self.module.ell, a)


# raw-array helpers (hot path: no FpMatrix wrapping)

def _nullspace(a: np.ndarray, ell: int) -> np.ndarray:
    return _backend.nullspace(a, ell)


def _colspace(a: np.ndarray, ell: int) -> np.ndarray:
    r, piv, rk = _backend.rref(a, ell)
    return a[:, piv[:rk]] % ell


def _intersection_dim(a: np.ndarray, b: np.ndarray, ell: int) -> int:
    ra = int(_backend.rank(a, ell))
    rb = int(_backend.rank(b, ell))
    rab = int(_backend.rank(np.concatenate([a, b], axis=1), ell))
    return ra + rb - rab


def _intersect(a: np.ndarray, b: np.ndarray, ell: int) -> np.ndarray:
    """Basis of colspan(a) intersect colspan(b)."""
    if a.shape[1] == 0 or b.shape[1] == 0:
        return np.zeros((a.shape[0], 0), dtype=np.int64)
    stacked = np.concatenate([a, (-b) % ell], axis=1)
    ker = _nullspace(stacked, ell)
    if ker.shape[1] == 0:
        return np.zeros((a.shape[0], 0), dtype=np.int64)
    vecs = (a @ ker[: a.shape[1], :]) % ell
    return _colspace(vecs, ell)


def _solve_cols(a: np.ndarray, b: np.ndarray, ell: int) -> np.ndarray:
    """x with a x = b, columnwise; raises DecompositionError if inconsistent."""
    cols = []
    for j in range(b.shape[1]):
        ok, x = _backend.solve(a, b[:, j], ell)
        if not ok:
            raise DecompositionError("linear system inconsistent during decomposition")
        cols.append(x)
    return np.stack(cols, axis=1) if cols else np.zeros((a.shape[1], 0), dtype=np.int64)


def _matpow(a: np.ndarray, e: int, ell: int) -> np.ndarray:
    out = np.eye(a.shape[0], dtype=np.int64)
    base = a % ell
    while e:
        if e & 1:
            out = (out @ base) % ell
        base = (base @ base) % ell
        e >>= 1
    return out


def _complete_span(base: np.ndarray, candidates: np.ndarray, ell: int) -> List[int]:
    """Indices of candidate columns completing colspan(base), by pivot order."""
    nb = base.shape[1]
    stacked = np.concatenate([base, candidates], axis=1)
    _, piv, rk = _backend.rref(stacked, ell)
    return [int(c) - nb for c in piv[:rk] if c >= nb]


def _seeded_chains(x: np.ndarray, ell: int, seeds: Sequence[np.ndarray], seed_size: int):
    """Extend the seed chain tops to a full chain basis of the nilpotent x.

    Returns the list of new chains only (each a list [t, x t, ...]); together
    with the seed chains these form a basis, verified by the caller.
    """
    q = x.shape[0]
    kernels = [np.zeros((q, 0), dtype=np.int64)]
    xp = x % ell
    while True:
        ker = _nullspace(xp, ell)
        kernels.append(ker)
        if ker.shape[1] == q:
            break
        xp = (xp @ x) % ell
    nil_index = len(kernels) - 1  # least j with x^j = 0 on the space

    def chain_of(top: np.ndarray, size: int) -> List[np.ndarray]:
        vecs = [top % ell]
        for _ in range(size - 1):
            vecs.append((x @ vecs[-1]) % ell)
        return vecs

    all_chains: List[Tuple[List[np.ndarray], int]] = [
        (chain_of(t, seed_size), seed_size) for t in seeds
    ]
    new_chains: List[List[np.ndarray]] = []
    for j in range(nil_index, 0, -1):
        descendants = [c[s - j] for c, s in all_chains if s >= j]
        if descendants:
            base = np.concatenate([kernels[j - 1]] + [d.reshape(-1, 1) for d in descendants], axis=1)
        else:
            base = kernels[j - 1]
        for idx in _complete_span(base, kernels[j], ell):
            chain = chain_of(kernels[j][:, idx], j)
            all_chains.append((chain, j))
            new_chains.append(chain)
            base = np.concatenate([base, chain[0].reshape(-1, 1)], axis=1)
    return new_chains


def decompose(m: ZModule) -> Decomposition:
    """Split m into cyclic chains; multiset of sizes matches jordan_multiplicities."""
    ell = m.ell
    d = m.dim
    parts: List[Tuple[int, List[np.ndarray]]] = []

    embed = np.eye(d, dtype=np.int64)  # columns: current Q's basis in ambient coords
    sigma_q = m.sigma.a.copy()
    level = 0
    x = (sigma_q - np.eye(d, dtype=np.int64)) % ell
    x_n = np.eye(d, dtype=np.int64)  # x^level, maintained incrementally
    while embed.shape[1] > 0:
        if level > d:
            raise DecompositionError("filtration level exceeded module dimension")
        q = embed.shape[1]
        fixed = _nullspace(x, ell)
        if fixed.shape[1] == 0:
            raise DecompositionError("nilpotent operator with trivial kernel")
        deep = _colspace((x_n @ x) % ell, ell)  # I^(level+1) Q
        high = _intersect(fixed, deep, ell)  # fixed elements of height > level
        u_idx = _complete_span(high, fixed, ell)
        if not u_idx:
            level += 1
            x_n = (x_n @ x) % ell
            continue

        seeds = []
        stage_parts: List[Tuple[int, List[np.ndarray]]] = []
        for idx in u_idx:
            u = fixed[:, idx]
            ok, p = _backend.solve(x_n, u, ell)
            if not ok:
                raise DecompositionError("height-N fixed vector with no x^N preimage")
            chain = [p % ell]
            for _ in range(level):
                chain.append((x @ chain[-1]) % ell)
            if not np.array_equal(chain[-1], u % ell):
                raise DecompositionError("lifted chain does not end at its fixed vector")
            seeds.append(p % ell)
            stage_parts.append((level + 1, chain))

        new_chains = _seeded_chains(x, ell, seeds, level + 1)

        seed_vecs = [v for _, c in stage_parts for v in c]
        comp_vecs = [v for c in new_chains for v in c]
        full = np.stack(seed_vecs + comp_vecs, axis=1) if (seed_vecs or comp_vecs) else np.zeros((q, 0), dtype=np.int64)
        if full.shape[1] != q or int(_backend.rank(full, ell)) != q:
            raise DecompositionError("chains do not form a basis of the complement stage")

        for n, chain in stage_parts:
            parts.append((n, [(embed @ v) % ell for v in chain]))

        level += 1
        if comp_vecs:
            comp = np.stack(comp_vecs, axis=1)
            sig_comp = (sigma_q @ comp) % ell
            if _intersection_dim(comp, np.stack(seed_vecs, axis=1), ell) != 0:
                raise DecompositionError("complement meets the split-off submodule")
            sigma_q = _solve_cols(comp, sig_comp, ell)  # restriction; solvable iff invariant
            embed = (embed @ comp) % ell
            x = (sigma_q - np.eye(comp.shape[1], dtype=np.int64)) % ell
            x_n = _matpow(x, level, ell)
        else:
            embed = np.zeros((d, 0), dtype=np.int64)
            sigma_q = np.zeros((0, 0), dtype=np.int64)

    parts.sort(key=lambda t: t[0])
    if sum(n for n, _ in parts) != d:
        raise DecompositionError("block sizes do not sum to the dimension")
    if d > 0:
        basis = np.stack([v for _, c in parts for v in c], axis=1)
    else:
        basis = np.zeros((0, 0), dtype=np.int64)
    ok, binv = _backend.inv(basis, ell)
    if not ok:
        raise DecompositionError("concatenated chains are not a basis")

    deco = Decomposition(
        module=m,
        parts=tuple((n, tuple(np.asarray(v) for v in c)) for n, c in parts),
        change_of_basis=FpMatrix(ell, binv),
    )
    conj = (binv @ m.sigma.a @ basis) % ell
    if not np.array_equal(conj, deco.block_diagonal().a):
        raise DecompositionError("change of basis does not block-diagonalize sigma")
    return deco


def is_pure(m: ZModule, basis: FpMatrix) -> bool:
    """Whether the invariant subspace E = colspan(basis) satisfies
    I^k E = I^k M intersect E for every k <= dim."""
    ell = m.ell
    e = basis.a if isinstance(basis, FpMatrix) else np.asarray(basis, dtype=np.int64) % ell
    if e.ndim != 2 or e.shape[0] != m.dim:
        raise ValueError("subspace basis must be a dim x k column matrix")
    k = e.shape[1]
    if int(_backend.rank(e, ell)) != k:
        raise ValueError("columns do not form a basis (dependent)")
    sig_e = (m.sigma.a @ e) % ell
    try:
        sigma_res = _solve_cols(e, sig_e, ell)
    except DecompositionError:
        raise ValueError("subspace is not sigma-invariant")

    x_amb = m.x.a
    x_res = (sigma_res - np.eye(k, dtype=np.int64)) % ell
    xk_amb = np.eye(m.dim, dtype=np.int64)
    xk_res = np.eye(k, dtype=np.int64)
    for _ in range(m.dim + 1):
        inner = (e @ _colspace(xk_res, ell)) % ell  # I^k E in ambient coords
        outer = _intersect(_colspace(xk_amb, ell), e, ell)  # I^k M intersect E
        if _intersection_dim(inner, outer, ell) != max(
            int(_backend.rank(inner, ell)), int(_backend.rank(outer, ell))
        ):
            return False
        xk_amb = (xk_amb @ x_amb) % ell
        xk_res = (xk_res @ x_res) % ell
    return True
