"""Pontryagin duality for finite modules.

Functionals are row vectors in the same coordinates as the module, so the
double dual is an exact identity on representations rather than a natural
isomorphism. The dual action (tau f)(m) = f(tau^-1 m) makes the dual sigma the
transpose of the inverse.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from . import linalg
from .linalg import FpMatrix
from .zmodule import ZHom, ZModule, aug_power, make_cyclic


@dataclass(frozen=True, eq=False)
class DualElement:
    """A functional eta: M -> F_ell, stored as a row vector of coefficients."""

    base: ZModule
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.int64) % self.base.ell
        if c.shape != (self.base.dim,):
            raise ValueError("coefficient length differs from module dimension")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    def __call__(self, v: np.ndarray) -> int:
        v = self.base.check_vector(v)
        return int((self.coeffs @ v) % self.base.ell)

    def is_zero(self) -> bool:
        return not self.coeffs.any()


def dualize(m: ZModule) -> ZModule:
    """The dual module: same dimension, sigma replaced by transpose of sigma^-1."""
    if m.dim == 0:
        return ZModule(m.ell, 0, m.sigma, label=f"dual({m.label})" if m.label else "")
    inv = linalg.invert(m.sigma)
    assert inv is not None  # sigma is invertible by the module invariant
    return ZModule(m.ell, m.dim, inv.transpose(), label=f"dual({m.label})" if m.label else "")


def dual_hom(f: ZHom) -> ZHom:
    """The dual of f: M -> N, a map dualize(N) -> dualize(M) by matrix transpose."""
    return ZHom(dualize(f.dst), dualize(f.src), f.A.transpose())


def _require_canonical_cyclic(m: ZModule) -> int:
    n = m.dim
    if m.sigma != make_cyclic(m.ell, n).sigma:
        raise ValueError("base module is not a cyclic module in its chain basis")
    return n


def basic_lemma_membership(f: DualElement, k: int) -> bool:
    """Whether f lies in I^k of the dual of V_n.

    Decided two ways which must agree: filtration membership in the dual
    module, and vanishing of f on I^(n-k) V_n.
    """
    if k < 0:
        raise ValueError("filtration index must be >= 0")
    n = _require_canonical_cyclic(f.base)
    dual = dualize(f.base)
    filt = aug_power(dual, min(k, n))
    by_filtration = linalg.solve(filt, f.coeffs) is not None

    j = max(n - k, 0)
    target = aug_power(f.base, j)
    by_annihilation = not ((f.coeffs @ target.a) % f.base.ell).any()

    if by_filtration != by_annihilation:
        raise AssertionError(
            "filtration membership and annihilation criterion disagree "
            f"(n={n}, k={k}): this is a bug"
        )
    return by_filtration


def cyclic_envelope(eta: DualElement) -> Tuple[int, ZHom]:
    """The cyclic submodule generated by eta in the dual, realized as a surjection.

    Returns (m, psi) with m the dimension of the span of eta under the dual
    action and psi: M -> V_m surjective. The generator functional of the dual
    of V_m (the last chain coordinate) composed with psi recovers eta; for
    eta = 0 the result is (0, zero map).
    """
    mod = eta.base
    ell = mod.ell
    if eta.is_zero():
        return 0, ZHom(mod, make_cyclic(ell, 0), linalg.zeros(ell, 0, mod.dim))

    # Row orbit eta, eta x, eta x^2, ... ; the span equals F_ell[[Z]] eta since
    # (sigma^-1 - 1)^i differs from x^i by the unit (-sigma^-1)^i.
    x = mod.x.a
    rows = [eta.coeffs.copy()]
    while True:
        nxt = (rows[-1] @ x) % ell
        if not nxt.any():
            break
        rows.append(nxt)
    m = len(rows)

    span_dim = linalg.rank(FpMatrix(ell, np.stack(rows, axis=0)))
    if span_dim != m:
        raise AssertionError("cyclic orbit rows are dependent: this is a bug")

    a = np.stack([rows[m - i] for i in range(1, m + 1)], axis=0)  # row i = eta x^(m-i)
    psi = ZHom(mod, make_cyclic(ell, m), FpMatrix(ell, a))
    if not psi.is_surjective():
        raise AssertionError("cyclic envelope map is not surjective: this is a bug")
    return m, psi


def generates_dual(f: DualElement) -> bool:
    """Whether f generates the dual of its (cyclic, chain-basis) base module."""
    n = _require_canonical_cyclic(f.base)
    if n == 0:
        return False
    return cyclic_envelope(f)[0] == n
