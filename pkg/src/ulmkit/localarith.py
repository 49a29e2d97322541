"""Local-global height simulator over Q.

Everything reduces to elementary modular arithmetic on rational primes: tame
local heights are pinned by the local cyclotomic index ell^t = max power with
p = 1 mod ell^(t+s), unramified places contribute infinity, and the global
height of a character is the minimum of its local heights. Wild places
(p = ell) are rejected rather than modeled.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Tuple, Union

from .linalg import is_prime
from .zmodule import INFINITY


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("ULMKIT_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class CycloContext:
    """Global parameters over the base field Q: an odd prime ell, and
    ell^s = number of ell-power roots of unity in Q(mu_ell), so s = 1."""

    ell: int
    s: int = 1

    def __post_init__(self):
        if not is_prime(self.ell) or self.ell == 2:
            raise ValueError("ell must be an odd prime")
        if self.s != 1:
            raise ValueError("over Q with ell odd the root-of-unity exponent s is 1")


def v_adic(ell: int, n: int) -> int:
    """ell-adic valuation of n (n != 0)."""
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % ell == 0:
        n //= ell
        v += 1
    return v


def local_index(p: int, ctx: CycloContext) -> int:
    """t with ell^t the index of the local subgroup at the degree-one place
    over p: the largest k >= 0 with p = 1 mod ell^(k+s)."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == ctx.ell:
        raise ValueError("wild place p = ell is unsupported")
    return max(0, v_adic(ctx.ell, p - 1) - ctx.s)


@dataclass(frozen=True)
class LocalPlace:
    """A rational prime p != ell with its local index exponent t
    (ell^t = index of the local subgroup)."""

    ell: int
    p: int
    t: int
    ramified: bool
    tame: bool = True

    def __post_init__(self):
        if not self.tame:
            raise ValueError("only tame places (p != ell) are representable")
        if self.p == self.ell:
            raise ValueError("wild place p = ell is unsupported")
        if self.t < 0:
            raise ValueError("negative local index exponent")


def place_over(p: int, ctx: CycloContext, ramified: bool) -> LocalPlace:
    return LocalPlace(ell=ctx.ell, p=p, t=local_index(p, ctx), ramified=ramified)


def _primes_upto(bound: int) -> List[int]:
    if bound < 2:
        return []
    sieve = bytearray([1]) * (bound + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, int(bound**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = b"\x00" * len(sieve[p * p :: p])
    return [i for i in range(2, bound + 1) if sieve[i]]


def sieve_Pk(ctx: CycloContext, k: int, bound: int) -> List[int]:
    """Primes p <= bound with p = 1 mod ell^(k+s) and p != 1 mod ell^(k+s+1),
    ascending. Parallel over ranges when ULMKIT_THREADS > 1; the merge is
    deterministic either way."""
    if bound < 2:
        raise ValueError("bound must be >= 2")
    if k < 0:
        raise ValueError("k must be >= 0")
    lo_mod = ctx.ell ** (k + ctx.s)
    hi_mod = lo_mod * ctx.ell
    primes = _primes_upto(bound)

    def scan(chunk: List[int]) -> List[int]:
        return [p for p in chunk if p % lo_mod == 1 and p % hi_mod != 1]

    workers = worker_count()
    if workers == 1 or len(primes) < 1024:
        return scan(primes)
    size = (len(primes) + workers - 1) // workers
    chunks = [primes[i : i + size] for i in range(0, len(primes), size)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(scan, chunks))
    return [p for part in parts for p in part]


Interval = Tuple[int, int]


def local_height_interval(place: LocalPlace, m: int) -> Union[float, Interval]:
    """INFINITY at unramified places; the closed window
    [max(0, ell^t - m), ell^t - 1] at tamely, nontrivially ramified ones.

    The window collapses to a point exactly when m = 1. Wild places never
    occur here (rejected at construction).
    """
    if m < 1:
        raise ValueError("target length m must be >= 1")
    if not place.ramified:
        return INFINITY
    q = place.ell**place.t
    return (max(0, q - m), q - 1)


@dataclass(frozen=True)
class CharacterSpec:
    """A character abstracted by its ramified prime set; over Q a nontrivial
    everywhere-unramified character does not exist, so the set is nonempty,
    and a conductor-p character of order ell needs p = 1 mod ell."""

    ctx: CycloContext
    ramified_primes: FrozenSet[int]
    m: int = 1

    def __post_init__(self):
        primes = frozenset(int(p) for p in self.ramified_primes)
        if not primes:
            raise ValueError("ramified set must be nonempty (no unramified nontrivial characters over Q)")
        for p in primes:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
            if p == self.ctx.ell:
                raise ValueError("wild ramification (p = ell) is unsupported")
            if p % self.ctx.ell != 1:
                raise ValueError(f"no order-{self.ctx.ell} character ramified at {p}: p != 1 mod ell")
        if self.m < 1:
            raise ValueError("target length m must be >= 1")
        object.__setattr__(self, "ramified_primes", primes)


def global_height(spec: CharacterSpec) -> Union[int, Interval]:
    """min over places of the local height.

    Unramified places contribute INFINITY and never attain the minimum. Exact
    for m = 1 (each ramified place contributes the point ell^t - 1); for m > 1
    only the componentwise window of the minimum is known, returned as bounds.
    """
    ctx = spec.ctx
    windows = []
    for p in sorted(spec.ramified_primes):
        w = local_height_interval(place_over(p, ctx, ramified=True), spec.m)
        assert w is not INFINITY
        windows.append(w)
    lo = min(w[0] for w in windows)
    hi = min(w[1] for w in windows)
    if spec.m == 1:
        assert lo == hi
        return lo
    return (lo, hi)


@dataclass(frozen=True)
class SpectrumEntry:
    k: int
    height: int
    witness: int


def ulm_spectrum(ctx: CycloContext, bound: int) -> Dict[int, SpectrumEntry]:
    """Realized finite heights of single-prime tame characters with witnesses.

    Maps each realized height ell^k - 1 to its level k and smallest witness
    prime <= bound, and asserts every admissible prime <= bound realizes a
    height of that shape (the sieves partition by k = v_ell(p-1) - s).
    """
    if bound < 2:
        raise ValueError("bound must be >= 2")
    out: Dict[int, SpectrumEntry] = {}
    k = 0
    while ctx.ell ** (k + ctx.s) <= bound:
        hits = sieve_Pk(ctx, k, bound)
        if hits:
            h = ctx.ell**k - 1
            out[h] = SpectrumEntry(k=k, height=h, witness=hits[0])
        k += 1
    # cross-check: every admissible prime realizes one of the listed heights
    realized = set(out)
    for p in _primes_upto(bound):
        if p == ctx.ell or (p - 1) % ctx.ell != 0:
            continue
        h = global_height(CharacterSpec(ctx, frozenset([p])))
        if h not in realized:
            raise AssertionError(f"prime {p} realizes unexpected height {h}: this is a bug")
    return out
