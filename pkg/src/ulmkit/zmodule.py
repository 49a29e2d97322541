"""Finite unipotent modules: a prime ell, a dimension d, and an invertible
unipotent d x d generator action.

Conventions, fixed globally: elements are column vectors and the generator
sigma acts on the left. Cyclic chain bases satisfy e_{i+1} = (sigma - 1) e_i,
so in the chain basis sigma is I plus the shift that sends e_i to e_{i+1}.
The augmentation filtration is I^k M = image of (sigma - 1)^k, and the height
of an element is its depth in that filtration (INFINITY exactly for 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np

from . import linalg
from .linalg import FpMatrix

INFINITY = math.inf

# Guard against accidental ell^k blowups in make_group_algebra and friends.
DIM_CAP = 512

Height = Union[int, float]


class LoadError(ValueError):
    """Malformed or invariant-violating module/group file."""

    def __init__(self, message: str, line: Optional[int] = None, col: Optional[int] = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class ZModule:
    """A finite module: sigma must be invertible with (sigma - I)^dim = 0.

    Unipotence is exactly continuity of the action at finite level: over F_ell
    (sigma - 1)^(ell^k) = sigma^(ell^k) - 1, so sigma unipotent iff sigma has
    ell-power order.
    """

    ell: int
    dim: int
    sigma: FpMatrix
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.dim < 0:
            raise ValueError("negative dimension")
        if self.sigma.ell != self.ell:
            raise ValueError("sigma modulus differs from module modulus")
        if self.sigma.a.shape != (self.dim, self.dim):
            raise ValueError("sigma shape differs from module dimension")
        if linalg.rank(self.sigma) != self.dim:
            raise ValueError("sigma is not invertible")
        if not _is_unipotent(self.sigma):
            raise ValueError("sigma is not unipotent: (sigma - I)^dim != 0")

    @property
    def x(self) -> FpMatrix:
        """The augmentation generator sigma - I (nilpotent)."""
        return FpMatrix(self.ell, self.sigma.a - np.eye(self.dim, dtype=np.int64))

    def check_vector(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64)
        if v.shape != (self.dim,):
            raise ValueError(f"vector of length {v.shape} in a module of dim {self.dim}")
        return v % self.ell


def _is_unipotent(sigma: FpMatrix) -> bool:
    d = sigma.rows
    if d == 0:
        return True
    x = (sigma.a - np.eye(d, dtype=np.int64)) % sigma.ell
    # Repeated squaring: x^(2^j) = 0 for 2^j >= d iff x^d = 0.
    e = 1
    while e < d:
        x = (x @ x) % sigma.ell
        e *= 2
    return not x.any()


@dataclass(frozen=True)
class ZHom:
    """An F_ell-linear map intertwining the generator actions: A sigma_src = sigma_dst A."""

    src: ZModule
    dst: ZModule
    A: FpMatrix

    def __post_init__(self):
        if self.src.ell != self.dst.ell or self.A.ell != self.src.ell:
            raise ValueError("modulus mismatch in hom")
        if self.A.a.shape != (self.dst.dim, self.src.dim):
            raise ValueError("hom matrix shape mismatch")
        lhs = (self.A.a @ self.src.sigma.a) % self.src.ell
        rhs = (self.dst.sigma.a @ self.A.a) % self.src.ell
        if not np.array_equal(lhs, rhs):
            raise ValueError("matrix does not intertwine the generator actions")

    def __call__(self, v: np.ndarray) -> np.ndarray:
        return linalg.mat_vec(self.A, self.src.check_vector(v))

    @property
    def rank(self) -> int:
        return linalg.rank(self.A)

    def is_surjective(self) -> bool:
        return self.rank == self.dst.dim

    def is_injective(self) -> bool:
        return self.rank == self.src.dim


def compose(g: ZHom, f: ZHom) -> ZHom:
    if f.dst is not g.src and f.dst != g.src:
        raise ValueError("homs are not composable")
    return ZHom(f.src, g.dst, linalg.mat_mul(g.A, f.A))


def identity_hom(m: ZModule) -> ZHom:
    return ZHom(m, m, linalg.identity(m.ell, m.dim))


# ---------------------------------------------------------------------------
# constructors

def make_cyclic(ell: int, n: int, label: str = "") -> ZModule:
    """The unique cyclic module of dimension n (single unipotent block).

    Chain basis e_1..e_n with e_{i+1} = (sigma - 1) e_i and (sigma - 1) e_n = 0.
    """
    if n < 0:
        raise ValueError("cyclic module length must be >= 0")
    a = np.eye(n, dtype=np.int64)
    for i in range(n - 1):
        a[i + 1, i] = 1
    return ZModule(ell, n, FpMatrix(ell, a), label or f"V_{n}")


def make_group_algebra(ell: int, k: int, label: str = "") -> ZModule:
    """F_ell[Z/ell^k Z] with sigma the cyclic shift of the group basis.

    Unipotent of dimension ell^k since (sigma - 1)^(ell^k) = sigma^(ell^k) - 1 = 0.
    """
    if k < 0:
        raise ValueError("level must be >= 0")
    q = ell**k
    if q > DIM_CAP:
        raise ValueError(f"dimension ell^k = {q} exceeds cap {DIM_CAP}")
    a = np.zeros((q, q), dtype=np.int64)
    for j in range(q):
        a[(j + 1) % q, j] = 1
    return ZModule(ell, q, FpMatrix(ell, a), label or f"F_{ell}[Z/{q}]")


def direct_sum(m: ZModule, n: ZModule) -> ZModule:
    if m.ell != n.ell:
        raise ValueError("modulus mismatch in direct sum")
    d = m.dim + n.dim
    a = np.zeros((d, d), dtype=np.int64)
    a[: m.dim, : m.dim] = m.sigma.a
    a[m.dim :, m.dim :] = n.sigma.a
    return ZModule(m.ell, d, FpMatrix(m.ell, a))


def natural_projection(ell: int, n: int, m: int) -> ZHom:
    """The projection V_n -> V_m killing I^m V_n: e_i -> e_i (i <= m), e_i -> 0 (i > m)."""
    if not 0 <= m <= n:
        raise ValueError(f"projection needs 0 <= m <= n, got n={n} m={m}")
    a = np.zeros((m, n), dtype=np.int64)
    for i in range(m):
        a[i, i] = 1
    return ZHom(make_cyclic(ell, n), make_cyclic(ell, m), FpMatrix(ell, a))


# ---------------------------------------------------------------------------
# filtration, fixed points, heights

def aug_power(m: ZModule, k: int) -> FpMatrix:
    """Basis (columns) of I^k M = image of (sigma - I)^k; empty for k >= dim."""
    if k < 0:
        raise ValueError("filtration index must be >= 0")
    if k == 0:
        return linalg.identity(m.ell, m.dim)
    if k >= m.dim:
        return linalg.zeros(m.ell, m.dim, 0)
    return linalg.column_space(linalg.mat_pow(m.x, k))


def fixed_part(m: ZModule) -> FpMatrix:
    """Basis of M^Z = ker(sigma - I), the elements annihilated by I."""
    vecs = linalg.kernel_basis(m.x)
    if not vecs:
        return linalg.zeros(m.ell, m.dim, 0)
    return FpMatrix(m.ell, np.stack(vecs, axis=1))


def element_height(m: ZModule, v: np.ndarray) -> Height:
    """Max k with v in I^k M; INFINITY iff v = 0 (I^dim M = 0 in a finite module)."""
    v = m.check_vector(v)
    if not v.any():
        return INFINITY
    h = 0
    xk = m.x.a.copy()
    while True:
        basis = linalg.column_space(FpMatrix(m.ell, xk))
        if linalg.solve(basis, v) is None:
            return h
        h += 1
        xk = (xk @ m.x.a) % m.ell


# ---------------------------------------------------------------------------
# random instances

def _random_partition(dim: int, rng: np.random.Generator) -> Tuple[int, ...]:
    parts = []
    left = dim
    while left > 0:
        s = int(rng.integers(1, left + 1))
        parts.append(s)
        left -= s
    return tuple(sorted(parts))


def _random_invertible(ell: int, dim: int, rng: np.random.Generator) -> FpMatrix:
    while True:
        a = FpMatrix(ell, rng.integers(0, ell, size=(dim, dim)))
        if linalg.rank(a) == dim:
            return a


def random_module_with_type(ell: int, dim: int, seed: int) -> Tuple[ZModule, Tuple[int, ...]]:
    """Seeded random module plus its hidden block-size multiset (ground truth).

    A block-size partition of dim is drawn, the block-diagonal unipotent matrix
    is built, then conjugated by a seeded random invertible matrix.
    """
    if dim > DIM_CAP:
        raise ValueError(f"dimension {dim} exceeds cap {DIM_CAP}")
    rng = np.random.default_rng(seed)
    parts = _random_partition(dim, rng) if dim > 0 else ()
    blocks = np.zeros((dim, dim), dtype=np.int64)
    pos = 0
    for s in parts:
        blocks[pos : pos + s, pos : pos + s] = make_cyclic(ell, s).sigma.a
        pos += s
    if dim == 0:
        return ZModule(ell, 0, linalg.zeros(ell, 0, 0)), ()
    p = _random_invertible(ell, dim, rng)
    pinv = linalg.invert(p)
    assert pinv is not None
    sigma = (p.a @ blocks @ pinv.a) % ell
    mod = ZModule(ell, dim, FpMatrix(ell, sigma), label=f"random(seed={seed})")
    return mod, parts


def random_module(ell: int, dim: int, seed: int) -> ZModule:
    return random_module_with_type(ell, dim, seed)[0]


def sigma_power_exponent(m: ZModule) -> int:
    """Least r with sigma^(ell^r) = I."""
    ident = np.eye(m.dim, dtype=np.int64)
    power = m.sigma.a.copy()
    r = 0
    while not np.array_equal(power % m.ell, ident):
        power = linalg.mat_pow(FpMatrix(m.ell, power), m.ell).a
        r += 1
    return r


# ---------------------------------------------------------------------------
# .zmod text format

def dumps_zmod(m: ZModule) -> str:
    lines = [f"l {m.ell}", f"dim {m.dim}", "sigma"]
    for i in range(m.dim):
        lines.append(" ".join(str(int(v)) for v in m.sigma.a[i]))
    return "\n".join(lines) + "\n"


def loads_zmod(text: str) -> ZModule:
    """Parse the .zmod format; invariant violations are load errors."""
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

    line, n0 = take("'l <prime>'")
    parts = line.split()
    if len(parts) != 2 or parts[0] != "l":
        raise LoadError("expected 'l <prime>'", line=n0)
    try:
        ell = int(parts[1])
    except ValueError:
        raise LoadError(f"bad modulus {parts[1]!r}", line=n0)

    line, n1 = take("'dim <d>'")
    parts = line.split()
    if len(parts) != 2 or parts[0] != "dim":
        raise LoadError("expected 'dim <d>'", line=n1)
    try:
        dim = int(parts[1])
    except ValueError:
        raise LoadError(f"bad dimension {parts[1]!r}", line=n1)
    if dim < 0:
        raise LoadError("dimension must be >= 0", line=n1)

    line, n2 = take("'sigma'")
    if line != "sigma":
        raise LoadError("expected 'sigma'", line=n2)

    rows = []
    for i in range(dim):
        line, nr = take(f"row {i + 1} of sigma")
        entries = line.split()
        if len(entries) != dim:
            raise LoadError(f"row has {len(entries)} entries, expected {dim}", line=nr)
        row = []
        for col, e in enumerate(entries):
            try:
                v = int(e)
            except ValueError:
                raise LoadError(f"bad entry {e!r}", line=nr, col=col + 1)
            if not 0 <= v < ell:
                raise LoadError(f"entry {v} out of range [0, {ell})", line=nr, col=col + 1)
            row.append(v)
        rows.append(row)
    if pos != len(tokens):
        raise LoadError("trailing content after sigma rows", line=tokens[pos][1])

    a = np.array(rows, dtype=np.int64).reshape(dim, dim)
    try:
        return ZModule(ell, dim, FpMatrix(ell, a))
    except ValueError as e:
        raise LoadError(f"invalid module: {e}", line=n0)


def load_zmod(path: str) -> ZModule:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_zmod(fh.read())
