"""Module-level embedding problems: lifting along natural projections.

A hom into the cyclic module V_n is determined by its last matrix row r (the
other rows are r x^(n-i), and the top row must satisfy r x^n = 0), so a lifting
problem (phi: M -> V_m, pi_{n,m}) reduces to one linear system. Solvability is
decided both that way and through the dual-element height criterion; the two
deciders must agree on every instance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import linalg
from .linalg import FpMatrix
from .duality import DualElement, dualize
from .zmodule import (
    ZHom,
    ZModule,
    direct_sum,
    element_height,
    make_cyclic,
    make_group_algebra,
    sigma_power_exponent,
)

# Full-matrix exhaustive searches refuse candidate spaces above this.
BRUTE_FORCE_BUDGET = 2**20


@dataclass(frozen=True)
class ModuleEP:
    """A lifting problem (phi: M -> V_m surjective, pi_{n,m}) with n >= m."""

    phi: ZHom
    n: int

    def __post_init__(self):
        m = self.phi.dst.dim
        if self.phi.dst.sigma != make_cyclic(self.phi.dst.ell, m).sigma:
            raise ValueError("target of phi must be a cyclic module in its chain basis")
        if not self.phi.is_surjective():
            raise ValueError("phi must be surjective")
        if self.n < m:
            raise ValueError(f"target length n={self.n} below m={m}")

    @property
    def m(self) -> int:
        return self.phi.dst.dim


@dataclass(frozen=True)
class EPWitness:
    psi: ZHom
    surjective: bool


def _dual_of_phi(phi: ZHom) -> DualElement:
    """The dual element attached to phi: its last row, a generator pullback.

    For the degenerate m = 0 target the attached element is zero.
    """
    if phi.dst.dim == 0:
        return DualElement(phi.src, np.zeros(phi.src.dim, dtype=np.int64))
    return DualElement(phi.src, phi.A.a[phi.dst.dim - 1])


def solve_module_ep(ep: ModuleEP) -> Optional[EPWitness]:
    """A lift psi with pi_{n,m} psi = phi, or None.

    Decided by direct linear solving of the chain-row system and independently
    by the height criterion on the dual element; raises if the two disagree.
    """
    mod = ep.phi.src
    ell = mod.ell
    m, n = ep.m, ep.n
    k = n - m
    eta = _dual_of_phi(ep.phi)

    xk = linalg.mat_pow(mod.x, k)
    r = linalg.solve(xk.transpose(), eta.coeffs)  # row solve: r x^k = eta
    by_linear = r is not None

    if eta.is_zero():
        # phi surjective with zero last row forces m = 0.
        by_height = True
    else:
        by_height = element_height(dualize(mod), eta.coeffs) >= k
    if by_linear != by_height:
        raise AssertionError(
            f"lifting deciders disagree (m={m}, n={n}): this is a bug"
        )
    if not by_linear:
        return None

    x = mod.x.a
    rows = [r % ell]
    for _ in range(n - 1):
        rows.append((rows[-1] @ x) % ell)
    rows.reverse()  # row i of psi is r x^(n-i)
    a = np.stack(rows, axis=0) if n > 0 else np.zeros((0, mod.dim), dtype=np.int64)
    psi = ZHom(mod, make_cyclic(ell, n), FpMatrix(ell, a))
    if not np.array_equal(psi.A.a[:m], ep.phi.A.a):
        raise AssertionError("constructed lift does not restrict to phi: this is a bug")
    return EPWitness(psi, psi.is_surjective())


def hom_height(phi: ZHom) -> int:
    """The maximal k for which (phi, pi_{m+k,m}) is solvable.

    Bounded by dim M - m on a finite module, so the search terminates; also
    cross-checked against the height of the dual element in the dual module.
    """
    m = phi.dst.dim
    if m < 1:
        raise ValueError("hom height needs a target of dimension >= 1")
    if not phi.is_surjective():
        raise ValueError("hom height is defined for surjective homs")
    mod = phi.src
    height = 0
    for k in range(1, mod.dim - m + 1):
        if solve_module_ep(ModuleEP(phi, m + k)) is None:
            break
        height = k
    dual_height = element_height(dualize(mod), _dual_of_phi(phi).coeffs)
    if height != dual_height:
        raise AssertionError("hom height differs from dual element height: this is a bug")
    return height


def quotient_of_free(mod: ZModule) -> Tuple[int, int, ZHom]:
    """Present mod as a quotient of a free group-algebra module.

    Returns (r, mult, surjection) with r the least exponent with
    sigma^(ell^r) = I, mult = dim M/IM the minimal generator count, and a
    verified surjection from mult copies of F_ell[Z/ell^r].
    """
    ell = mod.ell
    d = mod.dim
    r = sigma_power_exponent(mod)
    image_x = linalg.column_space(mod.x)
    mult = d - image_x.cols

    # Generators: standard basis vectors completing I M to M, in pivot order.
    ident = np.eye(d, dtype=np.int64)
    stacked = FpMatrix(ell, np.concatenate([image_x.a, ident], axis=1))
    _, piv, _ = linalg.rref(stacked)
    gens = [ident[:, c - image_x.cols] for c in piv if c >= image_x.cols]
    assert len(gens) == mult

    q = ell**r
    if mult == 0:
        free = ZModule(ell, 0, linalg.zeros(ell, 0, 0))
    else:
        free = make_group_algebra(ell, r)
        for _ in range(mult - 1):
            free = direct_sum(free, make_group_algebra(ell, r))

    cols = np.zeros((d, mult * q), dtype=np.int64)
    for i, g in enumerate(gens):
        v = g % ell
        for j in range(q):
            cols[:, i * q + j] = v
            v = (mod.sigma.a @ v) % ell
    surj = ZHom(free, mod, FpMatrix(ell, cols))
    if not surj.is_surjective():
        raise AssertionError("free presentation map is not surjective: this is a bug")
    return r, mult, surj


# ---------------------------------------------------------------------------
# exhaustive oracles (test-facing; budget-gated)

def exhaustive_lift_exists(ep: ModuleEP, budget: int = BRUTE_FORCE_BUDGET) -> bool:
    """Search every n x d matrix over F_ell for a lift; candidate space capped.

    Independent of solve_module_ep: candidates are checked entrywise against
    the intertwining and projection conditions.
    """
    mod = ep.phi.src
    ell, d, n, m = mod.ell, mod.dim, ep.n, ep.m
    total = ell ** (n * d)
    if total > budget:
        raise ValueError(f"candidate space {total} exceeds budget {budget}")
    sigma_m = mod.sigma.a
    sigma_n = make_cyclic(ell, n).sigma.a
    phi_a = ep.phi.A.a
    digits = np.zeros(n * d, dtype=np.int64)
    cand = np.zeros((n, d), dtype=np.int64)
    for _ in range(total):
        cand[:, :] = digits.reshape(n, d)
        if np.array_equal(cand[:m], phi_a) and np.array_equal(
            (cand @ sigma_m) % ell, (sigma_n @ cand) % ell
        ):
            return True
        # odometer increment
        for pos in range(n * d - 1, -1, -1):
            digits[pos] += 1
            if digits[pos] < ell:
                break
            digits[pos] = 0
    return False


def exhaustive_lift_exists_rows(ep: ModuleEP) -> bool:
    """Search all ell^d candidate last rows (every hom into V_n has one).

    Each candidate is expanded to a full matrix and checked entrywise, so the
    check does not rely on the linear-system decider.
    """
    mod = ep.phi.src
    ell, d, n, m = mod.ell, mod.dim, ep.n, ep.m
    if ell**d > BRUTE_FORCE_BUDGET:
        raise ValueError("row candidate space exceeds budget")
    if d == 0:
        return m == 0 or not ep.phi.A.a.any()
    x = mod.x.a
    sigma_m = mod.sigma.a
    sigma_n = make_cyclic(ell, n).sigma.a
    phi_a = ep.phi.A.a

    # all ell^d rows, one per column of the mixed-radix table
    count = ell**d
    rows = np.zeros((count, d), dtype=np.int64)
    for j in range(d):
        period = ell ** (d - 1 - j)
        rows[:, j] = (np.arange(count) // period) % ell
    # stack chains: level j holds rows @ x^(n-1-j)
    cand = np.zeros((count, n, d), dtype=np.int64)
    acc = rows
    for i in range(n, 0, -1):
        cand[:, i - 1, :] = acc
        acc = (acc @ x) % ell
    ok_proj = (cand[:, :m, :] == phi_a[None, :, :]).all(axis=(1, 2))
    lhs = np.einsum("cij,jk->cik", cand, sigma_m) % ell
    rhs = np.einsum("ij,cjk->cik", sigma_n, cand) % ell
    ok_hom = (lhs == rhs).all(axis=(1, 2))
    return bool((ok_proj & ok_hom).any())
