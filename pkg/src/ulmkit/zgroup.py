"""Finite ell-groups with an ell-power-order automorphism, and the
equivariant embedding-problem toolkit built on them.

Groups are Cayley tables over element indices (index 0 is the identity);
the distinguished automorphism theta is the finite-level action of the
chosen procyclic generator. Homomorphisms are index maps. Identity and
inverses are always verified fully; associativity is verified exhaustively
when loading .zgrp files (seeded spot checks on in-memory construction,
whose builders are associative by construction).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import linalg
from .linalg import FpMatrix, is_prime
from .zmodule import LoadError

ORDER_CAP = 1024
ASSOC_EXHAUSTIVE_CAP = 512
SEARCH_BUDGET = 2**20


class GroupError(ValueError):
    pass


class BudgetError(GroupError):
    """Exhaustive search would exceed the configured candidate budget."""


def _check_associativity(cayley: np.ndarray, exhaustive: bool, seed: int = 0) -> None:
    n = cayley.shape[0]
    if n <= 1:
        return
    if exhaustive:
        for a in range(n):
            left = cayley[cayley[a]]          # (b, c) -> (a b) c
            right = cayley[a][cayley]         # (b, c) -> a (b c)
            if not np.array_equal(left, right):
                raise GroupError(f"associativity fails at element {a}")
    else:
        rng = np.random.default_rng(seed)
        k = min(100_000, n**3)
        a = rng.integers(0, n, size=k)
        b = rng.integers(0, n, size=k)
        c = rng.integers(0, n, size=k)
        if not np.array_equal(cayley[cayley[a, b], c], cayley[a, cayley[b, c]]):
            raise GroupError("associativity fails on a spot-checked triple")


def _perm_order_is_ell_power(perm: np.ndarray, ell: int) -> bool:
    n = len(perm)
    seen = np.zeros(n, dtype=bool)
    for start in range(n):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = int(perm[i])
            length += 1
        while length % ell == 0:
            length //= ell
        if length != 1:
            return False
    return True


@dataclass(frozen=True, eq=False)
class FinZGroup:
    """A finite ell-group plus an automorphism theta of ell-power order."""

    ell: int
    cayley: np.ndarray = field(repr=False)
    theta: np.ndarray = field(repr=False)
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if not is_prime(self.ell):
            raise GroupError(f"modulus {self.ell} is not prime")
        cay = np.asarray(self.cayley, dtype=np.int64)
        th = np.asarray(self.theta, dtype=np.int64)
        n = cay.shape[0]
        if cay.shape != (n, n):
            raise GroupError("Cayley table must be square")
        if n > ORDER_CAP:
            raise GroupError(f"order {n} exceeds cap {ORDER_CAP}")
        m = n
        while m % self.ell == 0:
            m //= self.ell
        if m != 1:
            raise GroupError(f"order {n} is not a power of {self.ell}")
        if n == 0:
            raise GroupError("empty group")
        if cay.min() < 0 or cay.max() >= n:
            raise GroupError("Cayley entries out of range")
        if not np.array_equal(cay[0], np.arange(n)) or not np.array_equal(cay[:, 0], np.arange(n)):
            raise GroupError("index 0 is not a two-sided identity")
        # two-sided inverses, verified fully
        for a in range(n):
            invs = np.nonzero(cay[a] == 0)[0]
            if invs.size != 1 or cay[invs[0], a] != 0:
                raise GroupError(f"element {a} lacks a two-sided inverse")
        _check_associativity(cay, exhaustive=False)
        if th.shape != (n,) or sorted(th.tolist()) != list(range(n)):
            raise GroupError("theta is not a permutation of the elements")
        if not np.array_equal(th[cay], cay[th][:, th]):
            raise GroupError("theta is not an automorphism")
        if not _perm_order_is_ell_power(th, self.ell):
            raise GroupError("theta order is not a power of ell")
        cay.flags.writeable = False
        th.flags.writeable = False
        object.__setattr__(self, "cayley", cay)
        object.__setattr__(self, "theta", th)

    @property
    def order(self) -> int:
        return self.cayley.shape[0]

    def mul(self, a: int, b: int) -> int:
        return int(self.cayley[a, b])

    def inverse(self, a: int) -> int:
        return int(np.nonzero(self.cayley[a] == 0)[0][0])

    def inverses(self) -> np.ndarray:
        return np.argmin(self.cayley, axis=1)  # position of 0 in each row

    def conjugate(self, g: int, h: int) -> int:
        """h^-1 g h."""
        hi = self.inverse(h)
        return self.mul(self.mul(hi, g), h)


# ---------------------------------------------------------------------------
# subgroups

def subgroup_closure(g: FinZGroup, gens: Sequence[int], theta_closed: bool = True) -> np.ndarray:
    """Closure of the generators under multiplication (and theta); cyclic-extension
    style growth, never a powerset scan."""
    mask = np.zeros(g.order, dtype=bool)
    mask[0] = True
    for x in gens:
        mask[int(x)] = True
    while True:
        idx = np.nonzero(mask)[0]
        prods = g.cayley[np.ix_(idx, idx)].ravel()
        new = mask.copy()
        new[prods] = True
        if theta_closed:
            new[g.theta[idx]] = True
        if np.array_equal(new, mask):
            return idx
        mask = new


def is_subgroup(g: FinZGroup, idx: np.ndarray) -> bool:
    if 0 not in idx:
        return False
    mask = np.zeros(g.order, dtype=bool)
    mask[idx] = True
    return bool(mask[g.cayley[np.ix_(idx, idx)]].all())


def is_theta_invariant(g: FinZGroup, idx: np.ndarray) -> bool:
    mask = np.zeros(g.order, dtype=bool)
    mask[idx] = True
    return bool(mask[g.theta[idx]].all())


def is_normal(g: FinZGroup, idx: np.ndarray) -> bool:
    mask = np.zeros(g.order, dtype=bool)
    mask[idx] = True
    inv = g.inverses()
    for h in range(g.order):
        conj = g.cayley[g.cayley[inv[h], idx], h]
        if not mask[conj].all():
            return False
    return True


def product_set(g: FinZGroup, a_idx: np.ndarray, b_idx: np.ndarray) -> np.ndarray:
    return np.unique(g.cayley[np.ix_(a_idx, b_idx)])


def element_orders(g: FinZGroup) -> np.ndarray:
    out = np.ones(g.order, dtype=np.int64)
    for a in range(g.order):
        cur = a
        k = 1
        while cur != 0:
            cur = g.mul(cur, a)
            k += 1
        out[a] = k
    return out


def minimal_generators(g: FinZGroup) -> List[int]:
    """Greedy generating set (no theta closure), small for ell-groups."""
    gens: List[int] = []
    current = subgroup_closure(g, [], theta_closed=False)
    while len(current) < g.order:
        mask = np.zeros(g.order, dtype=bool)
        mask[current] = True
        nxt = int(np.nonzero(~mask)[0][0])
        gens.append(nxt)
        current = subgroup_closure(g, gens, theta_closed=False)
    return gens


def subgroup_as_group(g: FinZGroup, idx: np.ndarray, label: str = "") -> Tuple[FinZGroup, np.ndarray]:
    """Re-index a theta-invariant subgroup as its own FinZGroup.

    Returns (subgroup, embedding) with embedding[i] the ambient index of
    element i; element 0 stays the identity.
    """
    idx = np.asarray(sorted(int(i) for i in idx), dtype=np.int64)
    if not is_subgroup(g, idx):
        raise GroupError("index set is not a subgroup")
    if not is_theta_invariant(g, idx):
        raise GroupError("subgroup is not theta-invariant")
    pos = {int(v): i for i, v in enumerate(idx)}
    n = len(idx)
    cay = np.zeros((n, n), dtype=np.int64)
    for i, a in enumerate(idx):
        row = g.cayley[a, idx]
        cay[i] = [pos[int(v)] for v in row]
    th = np.array([pos[int(g.theta[a])] for a in idx], dtype=np.int64)
    return FinZGroup(g.ell, cay, th, label=label or f"sub({g.label})"), idx


def quotient_group(g: FinZGroup, n_idx: np.ndarray, label: str = "") -> Tuple[FinZGroup, np.ndarray]:
    """Quotient by a normal theta-invariant subgroup.

    Returns (quotient, projection) with projection[a] the coset index of a;
    cosets are indexed by their minimal ambient representative, identity first.
    """
    n_idx = np.asarray(sorted(int(i) for i in n_idx), dtype=np.int64)
    if not is_subgroup(g, n_idx):
        raise GroupError("kernel is not a subgroup")
    if not is_normal(g, n_idx):
        raise GroupError("kernel is not normal")
    if not is_theta_invariant(g, n_idx):
        raise GroupError("kernel is not theta-invariant")
    coset_of = -np.ones(g.order, dtype=np.int64)
    reps: List[int] = []
    for a in range(g.order):
        if coset_of[a] >= 0:
            continue
        members = g.cayley[a, n_idx]
        coset_of[members] = len(reps)
        reps.append(a)
    k = len(reps)
    cay = np.zeros((k, k), dtype=np.int64)
    for i, a in enumerate(reps):
        cay[i] = coset_of[g.cayley[a, reps]]
    th = coset_of[g.theta[np.array(reps)]]
    q = FinZGroup(g.ell, cay, th, label=label or f"{g.label}/N")
    return q, coset_of


# ---------------------------------------------------------------------------
# named constructions

def cyclic_group(ell: int, a: int, theta_unit: int = 1, label: str = "") -> FinZGroup:
    """C_(ell^a) written additively; theta multiplies by a fixed unit."""
    q = ell**a
    if q > ORDER_CAP:
        raise GroupError(f"order {q} exceeds cap {ORDER_CAP}")
    idx = np.arange(q, dtype=np.int64)
    cay = (idx[:, None] + idx[None, :]) % q
    th = (theta_unit * idx) % q
    return FinZGroup(ell, cay, th, label=label or f"C_{q}")


def elementary_abelian(ell: int, k: int, theta_matrix: Optional[FpMatrix] = None,
                       label: str = "") -> FinZGroup:
    """F_ell^k additively, elements in base-ell digit order; theta acts by a matrix."""
    q = ell**k
    if q > ORDER_CAP:
        raise GroupError(f"order {q} exceeds cap {ORDER_CAP}")
    vecs = np.zeros((q, k), dtype=np.int64)
    for j in range(k):
        vecs[:, j] = (np.arange(q) // ell ** (k - 1 - j)) % ell
    weights = ell ** np.arange(k - 1, -1, -1, dtype=np.int64)

    def enc(m: np.ndarray) -> np.ndarray:
        return (m % ell) @ weights

    cay = np.zeros((q, q), dtype=np.int64)
    for a in range(q):
        cay[a] = enc(vecs[a][None, :] + vecs)
    if theta_matrix is None:
        th = np.arange(q, dtype=np.int64)
    else:
        if theta_matrix.ell != ell or theta_matrix.a.shape != (k, k):
            raise GroupError("theta matrix has the wrong shape or modulus")
        th = enc(vecs @ theta_matrix.a.T)
    return FinZGroup(ell, cay, th, label=label or f"E_{ell}^{k}")


def heisenberg(ell: int, label: str = "") -> FinZGroup:
    """Unitriangular 3x3 group of order ell^3, trivial theta."""
    q = ell**3
    if q > ORDER_CAP:
        raise GroupError(f"order {q} exceeds cap {ORDER_CAP}")
    trip = [(a, b, c) for a in range(ell) for b in range(ell) for c in range(ell)]
    pos = {t: i for i, t in enumerate(trip)}
    # put the identity (0,0,0) at index 0: digit order already does
    cay = np.zeros((q, q), dtype=np.int64)
    for i, (a1, b1, c1) in enumerate(trip):
        for j, (a2, b2, c2) in enumerate(trip):
            cay[i, j] = pos[((a1 + a2) % ell, (b1 + b2) % ell, (c1 + c2 + a1 * b2) % ell)]
    th = np.arange(q, dtype=np.int64)
    return FinZGroup(ell, cay, th, label=label or f"Heis_{q}")


def direct_product(g: FinZGroup, h: FinZGroup, label: str = "") -> FinZGroup:
    if g.ell != h.ell:
        raise GroupError("modulus mismatch")
    n, m = g.order, h.order
    if n * m > ORDER_CAP:
        raise GroupError(f"order {n * m} exceeds cap {ORDER_CAP}")
    # index (a, b) -> a*m + b
    ga = np.repeat(np.arange(n), m)
    hb = np.tile(np.arange(m), n)
    cay = g.cayley[ga[:, None], ga[None, :]] * m + h.cayley[hb[:, None], hb[None, :]]
    th = g.theta[ga] * m + h.theta[hb]
    return FinZGroup(g.ell, cay, th, label=label or f"{g.label}x{h.label}")


def semidirect_with_Z(g: FinZGroup, r: int, label: str = "") -> FinZGroup:
    """G semidirect C_(ell^r) with the cyclic factor acting through theta.

    Elements are indexed (a, c) -> a*ell^r + c; multiplication is
    (a, c)(b, e) = (a theta^c(b), c + e), and the ambient action fixes the
    cyclic coordinate: theta'(a, c) = (theta(a), c). Requires theta^(ell^r) = id.
    """
    ell = g.ell
    q = ell**r
    n = g.order
    if n * q > ORDER_CAP:
        raise GroupError(f"order {n * q} exceeds cap {ORDER_CAP}")
    theta_pows = [np.arange(n, dtype=np.int64)]
    for _ in range(q - 1):
        theta_pows.append(g.theta[theta_pows[-1]])
    if not np.array_equal(g.theta[theta_pows[-1]], theta_pows[0]):
        raise GroupError(f"theta order does not divide ell^r = {q}")
    cay = np.zeros((n * q, n * q), dtype=np.int64)
    for a in range(n):
        for c in range(q):
            i = a * q + c
            tb = theta_pows[c]  # theta^c applied to each b
            # (a, c)(b, e) = (a * theta^c(b), c + e)
            prod_g = g.cayley[a, tb]  # length n over b
            for e in range(q):
                cay[i, np.arange(n) * q + e] = prod_g * q + (c + e) % q
    th = g.theta[np.repeat(np.arange(n), q)] * q + np.tile(np.arange(q), n)
    return FinZGroup(ell, cay, th, label=label or f"{g.label}:C_{q}")


def sd_decode(g_order_unused: int, q: int, idx: int) -> Tuple[int, int]:
    """Inverse of the (a, c) -> a*q + c layout used by semidirect products."""
    return idx // q, idx % q


def semidirect_conj(g: FinZGroup, k_idx: np.ndarray, u_idx: np.ndarray,
                    label: str = "") -> Tuple[FinZGroup, np.ndarray, np.ndarray]:
    """ker-by-conjugation semidirect K semidirect U inside an ambient group.

    K and U are theta-invariant subgroups of g with U normalizing K. Elements
    are pairs (k, u) indexed k_pos*|U| + u_pos; returns (group, k_embed, u_embed)
    giving ambient indices of the K and U coordinates.
    """
    k_idx = np.asarray(sorted(int(i) for i in k_idx), dtype=np.int64)
    u_idx = np.asarray(sorted(int(i) for i in u_idx), dtype=np.int64)
    for name, idx in (("K", k_idx), ("U", u_idx)):
        if not is_subgroup(g, idx):
            raise GroupError(f"{name} is not a subgroup")
        if not is_theta_invariant(g, idx):
            raise GroupError(f"{name} is not theta-invariant")
    k_mask = np.zeros(g.order, dtype=bool)
    k_mask[k_idx] = True
    inv = g.inverses()
    for u in u_idx:
        conj = g.cayley[g.cayley[u, k_idx], inv[u]]
        if not k_mask[conj].all():
            raise GroupError("U does not normalize K")
    nk, nu = len(k_idx), len(u_idx)
    if nk * nu > ORDER_CAP:
        raise GroupError(f"order {nk * nu} exceeds cap {ORDER_CAP}")
    k_pos = {int(v): i for i, v in enumerate(k_idx)}
    u_pos = {int(v): i for i, v in enumerate(u_idx)}
    cay = np.zeros((nk * nu, nk * nu), dtype=np.int64)
    for i1, k1 in enumerate(k_idx):
        for j1, u1 in enumerate(u_idx):
            a = i1 * nu + j1
            for i2, k2 in enumerate(k_idx):
                conj = g.cayley[g.cayley[u1, k2], inv[u1]]  # u1 k2 u1^-1
                knew = k_pos[int(g.cayley[k1, conj])]
                for j2, u2 in enumerate(u_idx):
                    cay[a, i2 * nu + j2] = knew * nu + u_pos[int(g.cayley[u1, u2])]
    th = np.zeros(nk * nu, dtype=np.int64)
    for i1, k1 in enumerate(k_idx):
        for j1, u1 in enumerate(u_idx):
            th[i1 * nu + j1] = k_pos[int(g.theta[k1])] * nu + u_pos[int(g.theta[u1])]
    return FinZGroup(g.ell, cay, th, label=label or "K:U"), k_idx, u_idx


# ---------------------------------------------------------------------------
# Frattini machinery

def frattini_subgroup(g: FinZGroup) -> np.ndarray:
    """Classical Frattini subgroup of an ell-group: closure of powers and commutators."""
    inv = g.inverses()
    gens = set()
    for a in range(g.order):
        p = a
        for _ in range(g.ell - 1):
            p = g.mul(p, a)
        gens.add(p)  # a^ell
    for a in range(g.order):
        for b in range(g.order):
            gens.add(int(g.cayley[g.cayley[g.cayley[inv[a], inv[b]], a], b]))
    return subgroup_closure(g, sorted(gens), theta_closed=False)


def _frattini_quotient_coords(g: FinZGroup) -> Tuple[np.ndarray, np.ndarray, FpMatrix]:
    """(projection to coset index, coordinates of each coset, induced theta matrix)
    for the elementary abelian quotient G/Phi(G)."""
    phi = frattini_subgroup(g)
    quo, proj = quotient_group(g, phi)
    n = quo.order
    ell = g.ell
    k = 0
    m = n
    while m > 1:
        m //= ell
        k += 1
    # greedy basis of the quotient vector space
    basis: List[int] = []
    span = subgroup_closure(quo, [], theta_closed=False)
    while len(span) < n:
        mask = np.zeros(n, dtype=bool)
        mask[span] = True
        basis.append(int(np.nonzero(~mask)[0][0]))
        span = subgroup_closure(quo, basis, theta_closed=False)
    assert len(basis) == k
    # coordinates by enumerating all ell^k combinations
    coords = np.zeros((n, k), dtype=np.int64)
    elem_of: Dict[Tuple[int, ...], int] = {}
    total = ell**k
    for code in range(total):
        digits = [(code // ell ** (k - 1 - j)) % ell for j in range(k)]
        e = 0
        for j, d in enumerate(digits):
            for _ in range(d):
                e = quo.mul(e, basis[j])
        elem_of[tuple(digits)] = e
        coords[e] = digits
    assert len(elem_of) == n
    theta_mat = np.zeros((k, k), dtype=np.int64)
    for j, b in enumerate(basis):
        theta_mat[:, j] = coords[quo.theta[b]]
    return proj, coords, FpMatrix(ell, theta_mat)


def maximal_invariant_subgroups(g: FinZGroup) -> List[np.ndarray]:
    """All maximal proper theta-invariant subgroups.

    In an ell-group with an ell-power-order automorphism these are exactly the
    invariant subgroups of index ell (a maximal invariant subgroup is normal
    since its normalizer is invariant and strictly larger, and the quotient
    has an invariant central subgroup of order ell); they are the preimages of
    the hyperplanes of G/Phi(G) containing the image of the induced theta - 1.
    """
    if g.order == 1:
        return []
    proj, coords, theta_mat = _frattini_quotient_coords(g)
    ell = g.ell
    k = theta_mat.a.shape[0]
    x = FpMatrix(ell, theta_mat.a - np.eye(k, dtype=np.int64))
    # functionals vanishing on im(theta-1): rows lambda with lambda x = 0
    lam_basis = linalg.kernel_basis(x.transpose())
    out: List[np.ndarray] = []
    if not lam_basis:
        return out
    b = np.stack(lam_basis, axis=1)  # k x t
    t = b.shape[1]
    seen = set()
    for code in range(1, ell**t):
        digits = np.array([(code // ell ** (t - 1 - j)) % ell for j in range(t)], dtype=np.int64)
        lam = (b @ digits) % ell
        # canonical representative up to scalar: first nonzero coefficient 1
        nz = np.nonzero(lam)[0]
        if lam[nz[0]] != 1:
            continue
        key = tuple(lam.tolist())
        if key in seen:
            continue
        seen.add(key)
        vals = (coords[proj] @ lam) % ell  # functional on every group element
        out.append(np.nonzero(vals == 0)[0].astype(np.int64))
    return out


def z_frattini(g: FinZGroup) -> np.ndarray:
    """Intersection of all maximal proper theta-invariant subgroups.

    Returns the whole group when no proper invariant subgroup exists (order 1).
    """
    maxes = maximal_invariant_subgroups(g)
    if not maxes:
        return np.arange(g.order, dtype=np.int64)
    mask = np.ones(g.order, dtype=bool)
    for idx in maxes:
        m = np.zeros(g.order, dtype=bool)
        m[idx] = True
        mask &= m
    return np.nonzero(mask)[0].astype(np.int64)


def all_invariant_subgroups(g: FinZGroup) -> List[np.ndarray]:
    """Every theta-invariant subgroup, by cyclic-extension closure growth.

    Exhaustive; intended for small orders (test oracles and small searches).
    """
    start = subgroup_closure(g, [], theta_closed=True)
    found = {tuple(start.tolist()): start}
    frontier = [start]
    while frontier:
        nxt = []
        for h in frontier:
            mask = np.zeros(g.order, dtype=bool)
            mask[h] = True
            for x in range(g.order):
                if mask[x]:
                    continue
                grown = subgroup_closure(g, list(h) + [x], theta_closed=True)
                key = tuple(grown.tolist())
                if key not in found:
                    found[key] = grown
                    nxt.append(grown)
        frontier = nxt
    return list(found.values())


# ---------------------------------------------------------------------------
# homomorphisms and embedding problems

def is_hom(src: FinZGroup, dst: FinZGroup, f: np.ndarray) -> bool:
    f = np.asarray(f, dtype=np.int64)
    if f.shape != (src.order,) or f[0] != 0:
        return False
    return bool(np.array_equal(f[src.cayley], dst.cayley[f[:, None], f[None, :]]))


def is_equivariant(src: FinZGroup, dst: FinZGroup, f: np.ndarray) -> bool:
    return bool(np.array_equal(f[src.theta], dst.theta[f]))


def kernel_of(f: np.ndarray) -> np.ndarray:
    return np.nonzero(np.asarray(f) == 0)[0].astype(np.int64)


def is_surjective_map(dst: FinZGroup, f: np.ndarray) -> bool:
    return len(np.unique(f)) == dst.order


@dataclass(frozen=True, eq=False)
class GroupEP:
    """An equivariant embedding problem (alpha: H -> Gamma, beta: G -> Gamma)."""

    h: FinZGroup
    g: FinZGroup
    gamma: FinZGroup
    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        for name, src, f in (("alpha", self.h, self.alpha), ("beta", self.g, self.beta)):
            f = np.asarray(f, dtype=np.int64)
            if not is_hom(src, self.gamma, f):
                raise GroupError(f"{name} is not a homomorphism")
            if not is_equivariant(src, self.gamma, f):
                raise GroupError(f"{name} does not commute with the actions")
            if not is_surjective_map(self.gamma, f):
                raise GroupError(f"{name} is not surjective")
        object.__setattr__(self, "alpha", np.asarray(self.alpha, dtype=np.int64))
        object.__setattr__(self, "beta", np.asarray(self.beta, dtype=np.int64))


def _bfs_tree(g: FinZGroup, gens: Sequence[int]) -> List[Tuple[int, int, int]]:
    """Spanning tree [(node, parent, gen_pos)] covering the group, BFS from 0."""
    seen = np.zeros(g.order, dtype=bool)
    seen[0] = True
    order: List[Tuple[int, int, int]] = []
    queue = [0]
    while queue:
        cur = queue.pop(0)
        for pos, x in enumerate(gens):
            nxt = g.mul(cur, int(x))
            if not seen[nxt]:
                seen[nxt] = True
                order.append((nxt, cur, pos))
                queue.append(nxt)
    if not seen.all():
        raise GroupError("generators do not generate the group")
    return order


def enumerate_solutions(ep: GroupEP, budget: int = SEARCH_BUDGET,
                        first_only: bool = False) -> List[np.ndarray]:
    """All solutions gamma: H -> G (homs with beta gamma = alpha, commuting
    with the actions), by exhaustive search over generator images in the
    beta-fibers. Candidate tuples above the budget raise BudgetError."""
    h, g = ep.h, ep.g
    gens = minimal_generators(h)
    if not gens:
        cand_for = []
    else:
        # fiber of beta over alpha(gen), pruned by order divisibility
        h_orders = element_orders(h)
        g_orders = element_orders(g)
        cand_for = [
            np.nonzero((ep.beta == ep.alpha[x]) & (h_orders[x] % g_orders == 0))[0]
            for x in gens
        ]
    total = 1
    for f in cand_for:
        total *= len(f)
        if total > budget:
            raise BudgetError(f"candidate space exceeds budget {budget}")
    tree = _bfs_tree(h, gens) if gens else []

    if total == 0:
        return []
    # mixed-radix enumeration, vectorized over all candidate tuples
    sizes = [len(f) for f in cand_for]
    count = total
    images = np.zeros((count, max(len(gens), 1)), dtype=np.int64)
    period = count
    for j, f in enumerate(cand_for):
        period //= sizes[j]
        images[:, j] = f[(np.arange(count) // period) % sizes[j]]

    out: List[np.ndarray] = []
    chunk = max(1, min(count, (1 << 22) // max(h.order, 1)))
    for lo in range(0, count, chunk):
        hi = min(count, lo + chunk)
        maps = np.zeros((hi - lo, h.order), dtype=np.int64)
        for node, parent, pos in tree:
            maps[:, node] = g.cayley[maps[:, parent], images[lo:hi, pos]]
        # cheap vectorized filters first: compatibility and equivariance
        ok = (ep.beta[maps] == ep.alpha[None, :]).all(axis=1)
        ok &= (maps[:, h.theta] == g.theta[maps]).all(axis=1)
        maps = maps[ok]
        # full homomorphism check on the survivors, compacting as they fail
        for a in range(h.order):
            if maps.shape[0] == 0:
                break
            good = (maps[:, h.cayley[a]] == g.cayley[maps[:, a][:, None], maps]).all(axis=1)
            if not good.all():
                maps = maps[good]
        for m in maps:
            out.append(m.copy())
            if first_only:
                return out
    return out


@dataclass(frozen=True, eq=False)
class Classification:
    split: bool
    frattini: bool
    section: Optional[np.ndarray]


def classify_ep(ep: GroupEP, budget: int = SEARCH_BUDGET) -> Classification:
    """Split is decided by exhaustive search over equivariant homomorphic
    sections (witness returned); Frattini via the invariant Frattini subgroup."""
    ker = kernel_of(ep.beta)
    phi_z = set(z_frattini(ep.g).tolist())
    frattini = all(int(x) in phi_z for x in ker)
    section_ep = GroupEP(ep.gamma, ep.g, ep.gamma, np.arange(ep.gamma.order), ep.beta)
    sections = enumerate_solutions(section_ep, budget=budget, first_only=True)
    return Classification(split=bool(sections), frattini=frattini,
                          section=sections[0] if sections else None)


@dataclass(frozen=True, eq=False)
class SolutionsReport:
    count: int
    all_proper: bool
    improper: Optional[np.ndarray]


def frattini_solutions_proper(ep: GroupEP, budget: int = SEARCH_BUDGET) -> SolutionsReport:
    """Enumerate every solution of a Frattini problem and check properness.

    Refuses non-Frattini input; a report with count 0 passes vacuously.
    """
    if not classify_ep(ep, budget=budget).frattini:
        raise GroupError("embedding problem is not Frattini")
    sols = enumerate_solutions(ep, budget=budget)
    for s in sols:
        if not is_surjective_map(ep.g, s):
            return SolutionsReport(count=len(sols), all_proper=False, improper=s)
    return SolutionsReport(count=len(sols), all_proper=True, improper=None)


@dataclass(frozen=True, eq=False)
class FrattiniReduction:
    u_indices: np.ndarray
    u_group: FinZGroup
    u_embed: np.ndarray
    ep_u: GroupEP
    alpha_u: Optional[np.ndarray]
    ep_split: Optional[GroupEP]
    split_k_embed: Optional[np.ndarray]
    split_u_embed: Optional[np.ndarray]


def frattini_reduce(ep: GroupEP, budget: int = SEARCH_BUDGET) -> FrattiniReduction:
    """Reduce to a Frattini problem on a minimal invariant subgroup mapping
    onto Gamma, plus the induced split problem over the kernel semidirect it.

    ep_split carries a found solution of ep_u as its alpha and the projection
    ker(beta) semidirect U -> U as its beta; it is None when ep_u has no
    solution within budget.
    """
    g = ep.g
    u_idx = np.arange(g.order, dtype=np.int64)
    gamma_order = ep.gamma.order
    while True:
        u_grp, u_emb = subgroup_as_group(g, u_idx)
        shrunk = False
        for m in maximal_invariant_subgroups(u_grp):
            ambient = u_emb[m]
            if len(np.unique(ep.beta[ambient])) == gamma_order:
                u_idx = np.asarray(sorted(int(v) for v in ambient), dtype=np.int64)
                shrunk = True
                break
        if not shrunk:
            break
    u_grp, u_emb = subgroup_as_group(g, u_idx, label="U")
    beta_u = ep.beta[u_emb]
    ep_u = GroupEP(ep.h, u_grp, ep.gamma, ep.alpha, beta_u)
    phi_z = set(z_frattini(u_grp).tolist())
    if not all(int(x) in phi_z for x in kernel_of(beta_u)):
        raise GroupError("reduced problem failed its Frattini verification")

    sols = enumerate_solutions(ep_u, budget=budget, first_only=True)
    if not sols:
        return FrattiniReduction(u_idx, u_grp, u_emb, ep_u, None, None, None, None)
    alpha_u = sols[0]

    ker = kernel_of(ep.beta)
    s_grp, k_emb, u_emb2 = semidirect_conj(g, ker, u_idx, label="ker:U")
    nu = len(u_emb2)
    # beta': (k, u) -> u; positions in u_emb2 are exactly u_grp indices
    beta_split = np.arange(s_grp.order, dtype=np.int64) % nu
    ep_split = GroupEP(ep.h, s_grp, u_grp, alpha_u, beta_split)
    # verified split: u -> (identity, u) is an equivariant homomorphic section
    section = np.arange(nu, dtype=np.int64)
    if not (is_hom(u_grp, s_grp, section) and is_equivariant(u_grp, s_grp, section)
            and np.array_equal(beta_split[section], np.arange(nu))):
        raise GroupError("induced problem failed its split verification")
    return FrattiniReduction(u_idx, u_grp, u_emb, ep_u, alpha_u, ep_split, k_emb, u_emb2)


def combine_reduced_solution(red: FrattiniReduction, gamma_prime: np.ndarray,
                             ep: GroupEP) -> np.ndarray:
    """Turn a proper solution of ep_split into a proper solution of ep:
    gamma'(h) = (k, u) maps to k u multiplied in G."""
    if red.ep_split is None:
        raise GroupError("reduction carries no split problem")
    nu = len(red.split_u_embed)
    k_part = red.split_k_embed[np.asarray(gamma_prime) // nu]
    u_part = red.split_u_embed[np.asarray(gamma_prime) % nu]
    combined = ep.g.cayley[k_part, u_part]
    if not is_hom(ep.h, ep.g, combined) or not is_equivariant(ep.h, ep.g, combined):
        raise GroupError("combined map is not an equivariant homomorphism")
    if not np.array_equal(ep.beta[combined], ep.alpha):
        raise GroupError("combined map does not solve the original problem")
    return combined


# ---------------------------------------------------------------------------
# fiber products

@dataclass(frozen=True, eq=False)
class FiberCombination:
    hom: np.ndarray
    target: FinZGroup
    kernel_identity: bool
    index_bookkeeping: bool
    proper: bool


def fiber_combine(h: FinZGroup, g: FinZGroup, gamma: FinZGroup, pi: np.ndarray,
                  r: int, big_r: int, psi2: np.ndarray, phi1: np.ndarray) -> FiberCombination:
    """Combine psi2: H -> G:C_(ell^r) and phi1: H -> Gamma:C_(ell^R) into the
    induced map to G:C_(ell^R), the fiber product over Gamma:C_(ell^r).

    pi: G -> Gamma is the underlying surjection. The two inputs must agree
    after projecting to the common quotient. Surjectivity of the result is
    certified by the kernel-index bookkeeping and checked directly; the
    kernel product identity is computed and reported.
    """
    if r > big_r:
        raise GroupError("the cyclic level r must not exceed R")
    ell = g.ell
    qr, qR = ell**r, ell**big_r
    b_r = semidirect_with_Z(g, r)
    b_R = semidirect_with_Z(g, big_r)
    a_R = semidirect_with_Z(gamma, big_r)
    if not (is_hom(h, b_r, psi2) and is_equivariant(h, b_r, psi2)):
        raise GroupError("psi2 is not an equivariant homomorphism into G:C_(ell^r)")
    if not (is_hom(h, a_R, phi1) and is_equivariant(h, a_R, phi1)):
        raise GroupError("phi1 is not an equivariant homomorphism into Gamma:C_(ell^R)")
    if not is_hom(g, gamma, pi):
        raise GroupError("pi is not a homomorphism")

    # common quotient Gamma:C_(ell^r)
    g_of_psi, c_of_psi = psi2 // qr, psi2 % qr
    gam_of_phi, c_of_phi = phi1 // qR, phi1 % qR
    if not np.array_equal(pi[g_of_psi], gam_of_phi) or not np.array_equal(c_of_psi, c_of_phi % qr):
        raise GroupError("inputs disagree on the common quotient")

    combined = g_of_psi * qR + c_of_phi
    if not (is_hom(h, b_R, combined) and is_equivariant(h, b_R, combined)):
        raise GroupError("combined map is not an equivariant homomorphism")

    phi2 = pi[g_of_psi] * qr + c_of_psi  # H -> Gamma:C_(ell^r), the common quotient map
    ker_psi2 = kernel_of(psi2)
    ker_phi1 = kernel_of(phi1)
    ker_phi2 = kernel_of(phi2)
    prod = product_set(h, ker_psi2, ker_phi1)
    kernel_identity = np.array_equal(prod, ker_phi2)

    ker_comb = kernel_of(combined)
    lhs = len(ker_phi1) // max(len(ker_comb), 1)
    rhs = len(ker_phi2) // max(len(ker_psi2), 1)
    bookkeeping = (lhs == rhs)
    proper = is_surjective_map(b_R, combined)
    return FiberCombination(combined, b_R, kernel_identity, bookkeeping, proper)


# ---------------------------------------------------------------------------
# splitting lemma

@dataclass(frozen=True, eq=False)
class SplittingWitness:
    n_indices: np.ndarray
    z_indices: np.ndarray


def splitting_lemma_check(g: FinZGroup, n_idx: np.ndarray, p_idx: np.ndarray,
                          z_idx: np.ndarray) -> SplittingWitness:
    """Verify N normal, G = NP, P = (N cap P) semidirect Z, and produce the
    induced decomposition G = N semidirect Z. Hypothesis violations raise
    with the failed hypothesis named."""
    n_idx = np.asarray(sorted(set(int(i) for i in n_idx)), dtype=np.int64)
    p_idx = np.asarray(sorted(set(int(i) for i in p_idx)), dtype=np.int64)
    z_idx = np.asarray(sorted(set(int(i) for i in z_idx)), dtype=np.int64)
    if not is_subgroup(g, n_idx):
        raise GroupError("hypothesis failed: N is not a subgroup")
    if not is_normal(g, n_idx):
        raise GroupError("hypothesis failed: N is not normal in G")
    if not is_subgroup(g, p_idx):
        raise GroupError("hypothesis failed: P is not a subgroup")
    if not is_subgroup(g, z_idx):
        raise GroupError("hypothesis failed: Z is not a subgroup")
    p_set = set(p_idx.tolist())
    if not set(z_idx.tolist()) <= p_set:
        raise GroupError("hypothesis failed: Z is not contained in P")
    if len(product_set(g, n_idx, p_idx)) != g.order:
        raise GroupError("hypothesis failed: G != NP")
    f_idx = np.array(sorted(set(n_idx.tolist()) & p_set), dtype=np.int64)
    # P = F semidirect Z: F normal in P, F cap Z = 1, FZ = P
    pos_in_p = {int(v): i for i, v in enumerate(p_idx)}
    f_in_p = np.array([pos_in_p[int(v)] for v in f_idx], dtype=np.int64)
    z_in_p = np.array([pos_in_p[int(v)] for v in z_idx], dtype=np.int64)
    sub_p_cay = np.zeros((len(p_idx), len(p_idx)), dtype=np.int64)
    for i, a in enumerate(p_idx):
        sub_p_cay[i] = [pos_in_p[int(v)] for v in g.cayley[a, p_idx]]
    p_grp = FinZGroup(g.ell, sub_p_cay, np.array([pos_in_p[int(g.theta[a])] for a in p_idx])
                      if is_theta_invariant(g, p_idx) else np.arange(len(p_idx)))
    if not is_normal(p_grp, f_in_p):
        raise GroupError("hypothesis failed: F = N cap P is not normal in P")
    if len(set(f_idx.tolist()) & set(z_idx.tolist())) != 1:
        raise GroupError("hypothesis failed: F cap Z is not trivial")
    if len(product_set(g, f_idx, z_idx)) != len(p_idx):
        raise GroupError("hypothesis failed: FZ != P")
    # conclusion, verified
    if len(set(n_idx.tolist()) & set(z_idx.tolist())) != 1:
        raise GroupError("conclusion failed: N cap Z is not trivial")
    if len(product_set(g, n_idx, z_idx)) != g.order:
        raise GroupError("conclusion failed: NZ != G")
    return SplittingWitness(n_indices=n_idx, z_indices=z_idx)


# ---------------------------------------------------------------------------
# .zgrp format

def dumps_zgrp(g: FinZGroup) -> str:
    lines = [f"l {g.ell}", f"order {g.order}", "cayley"]
    for i in range(g.order):
        lines.append(" ".join(str(int(v)) for v in g.cayley[i]))
    lines.append("theta")
    lines.append(" ".join(str(int(v)) for v in g.theta))
    return "\n".join(lines) + "\n"


def loads_zgrp(text: str) -> FinZGroup:
    tokens: List[Tuple[str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            tokens.append((stripped, lineno))
    pos = 0

    def take(what: str) -> Tuple[str, int]:
        nonlocal pos
        if pos >= len(tokens):
            raise LoadError(f"unexpected end of file, expected {what}",
                            line=tokens[-1][1] + 1 if tokens else 1)
        t = tokens[pos]
        pos += 1
        return t

    def int_row(line: str, lineno: int, count: int, bound: int) -> List[int]:
        parts = line.split()
        if len(parts) != count:
            raise LoadError(f"row has {len(parts)} entries, expected {count}", line=lineno)
        vals = []
        for col, p in enumerate(parts):
            try:
                v = int(p)
            except ValueError:
                raise LoadError(f"bad entry {p!r}", line=lineno, col=col + 1)
            if not 0 <= v < bound:
                raise LoadError(f"entry {v} out of range [0, {bound})", line=lineno, col=col + 1)
            vals.append(v)
        return vals

    line, n0 = take("'l <prime>'")
    parts = line.split()
    if len(parts) != 2 or parts[0] != "l":
        raise LoadError("expected 'l <prime>'", line=n0)
    try:
        ell = int(parts[1])
    except ValueError:
        raise LoadError(f"bad modulus {parts[1]!r}", line=n0)

    line, n1 = take("'order <n>'")
    parts = line.split()
    if len(parts) != 2 or parts[0] != "order":
        raise LoadError("expected 'order <n>'", line=n1)
    try:
        order = int(parts[1])
    except ValueError:
        raise LoadError(f"bad order {parts[1]!r}", line=n1)
    if not 1 <= order <= ORDER_CAP:
        raise LoadError(f"order must be in [1, {ORDER_CAP}]", line=n1)

    line, n2 = take("'cayley'")
    if line != "cayley":
        raise LoadError("expected 'cayley'", line=n2)
    rows = []
    for i in range(order):
        line, nr = take(f"cayley row {i + 1}")
        rows.append(int_row(line, nr, order, order))
    line, n3 = take("'theta'")
    if line != "theta":
        raise LoadError("expected 'theta'", line=n3)
    line, n4 = take("theta row")
    th = int_row(line, n4, order, order)
    if pos != len(tokens):
        raise LoadError("trailing content after theta", line=tokens[pos][1])

    cay = np.array(rows, dtype=np.int64)
    try:
        _check_associativity(cay, exhaustive=order <= ASSOC_EXHAUSTIVE_CAP)
        return FinZGroup(ell, cay, np.array(th, dtype=np.int64))
    except GroupError as e:
        raise LoadError(f"invalid group: {e}", line=n0)


def load_zgrp(path: str) -> FinZGroup:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_zgrp(fh.read())
