"""Truncated generator/relation emitter and its round-trip verifier.

Two relation shapes are emitted. A cyclic family of level k has ell^k
generators with x_i^s = x_{i+1} y_i and the wraparound x_{q-1}^s = x_0 y; a
truncated free family has T generators with x_i^s = x_{i+1} x_i y_i and an
explicit truncation marker on the last generator standing in for the cut
infinite product (silently dropping it would misrepresent the output). All
correction terms y, y_i are emitted trivial, which is licensed precisely
because an emission only ever contains finitely many of them.

realize() abelianizes the relation records mod ell: each cyclic family
becomes the group-algebra module (sigma a cyclic permutation), each truncated
free family becomes the cyclic module of dimension T (sigma - 1 a shift).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Tuple

import numpy as np

from .linalg import FpMatrix, is_prime
from .ulm import ulm_invariants
from .zmodule import ZModule


@dataclass(frozen=True)
class PresentationBudget:
    """Finite multiplicities per family; omega is representable only as a
    user-chosen finite multiplicity plus the is_countable annotation, which
    is carried into output metadata and nothing else."""

    ell: int
    max_level: int = 0
    cyclic_mult: Mapping[int, int] = field(default_factory=dict)
    free_mult: int = 0
    truncation: int = 1
    is_countable: bool = False

    def __post_init__(self):
        if not is_prime(self.ell):
            raise ValueError(f"modulus {self.ell} is not prime")
        if self.max_level < 0:
            raise ValueError("max level must be >= 0")
        if self.truncation < 1:
            raise ValueError("truncation length must be >= 1")
        mult = {int(k): int(v) for k, v in dict(self.cyclic_mult).items()}
        for k, v in mult.items():
            if not 0 <= k <= self.max_level:
                raise ValueError(f"cyclic level {k} outside 0..{self.max_level}")
            if v < 0:
                raise ValueError("multiplicities must be >= 0")
        if self.free_mult < 0:
            raise ValueError("multiplicities must be >= 0")
        object.__setattr__(self, "cyclic_mult", mult)


@dataclass(frozen=True)
class Relation:
    """One relation x_i^s = (product of generators), or a truncation marker."""

    family: str
    index: int
    rhs: Tuple[int, ...]  # generator indices within the family, in product order
    kind: str  # "chain" | "wraparound" | "truncated"


@dataclass(frozen=True)
class Family:
    name: str
    kind: str  # "cyclic" | "free"
    level: int  # k for cyclic families, truncation length for free ones
    size: int


@dataclass(frozen=True)
class Presentation:
    ell: int
    families: Tuple[Family, ...]
    relations: Tuple[Relation, ...]
    metadata: Dict[str, object]

    def generator_names(self) -> List[str]:
        return [f"{fam.name}.x{i}" for fam in self.families for i in range(fam.size)]


def emit(budget: PresentationBudget) -> Presentation:
    """Emit the presentation for the budget, all correction terms trivial."""
    families: List[Family] = []
    relations: List[Relation] = []
    for k in range(budget.max_level + 1):
        for copy in range(budget.cyclic_mult.get(k, 0)):
            q = budget.ell**k
            name = f"c{k}.{copy}"
            families.append(Family(name=name, kind="cyclic", level=k, size=q))
            for i in range(q - 1):
                relations.append(Relation(name, i, (i + 1,), "chain"))
            relations.append(Relation(name, q - 1, (0,), "wraparound"))
    for copy in range(budget.free_mult):
        t = budget.truncation
        name = f"f.{copy}"
        families.append(Family(name=name, kind="free", level=t, size=t))
        for i in range(t - 1):
            relations.append(Relation(name, i, (i + 1, i), "chain"))
        relations.append(Relation(name, t - 1, (), "truncated"))
    meta: Dict[str, object] = {
        "ell": budget.ell,
        "max_level": budget.max_level,
        "is_countable": budget.is_countable,
        # No relations exist for the families above the level budget; they
        # span an invariant complement and are recorded opaquely, never made up.
        "above_level_families": "opaque",
    }
    return Presentation(budget.ell, tuple(families), tuple(relations), meta)


def realize(pres: Presentation) -> ZModule:
    """Assemble the module whose action is read off the relation records."""
    ell = pres.ell
    sizes = [fam.size for fam in pres.families]
    total = sum(sizes)
    offsets = {}
    pos = 0
    for fam in pres.families:
        offsets[fam.name] = pos
        pos += fam.size
    sigma = np.zeros((total, total), dtype=np.int64)
    per_family: Dict[str, Dict[int, Relation]] = {fam.name: {} for fam in pres.families}
    fam_by_name = {fam.name: fam for fam in pres.families}
    for rel in pres.relations:
        if rel.family not in per_family:
            raise ValueError(f"relation references unknown family {rel.family!r}")
        fam = fam_by_name[rel.family]
        if not 0 <= rel.index < fam.size:
            raise ValueError(f"relation index {rel.index} outside family {rel.family!r}")
        if rel.index in per_family[rel.family]:
            raise ValueError(f"duplicate relation for {rel.family!r} x{rel.index}")
        per_family[rel.family][rel.index] = rel
    for fam in pres.families:
        rels = per_family[fam.name]
        if sorted(rels) != list(range(fam.size)):
            raise ValueError(f"family {fam.name!r} is missing relations")
        base = offsets[fam.name]
        for i in range(fam.size):
            rel = rels[i]
            col = np.zeros(total, dtype=np.int64)
            if rel.kind == "truncated":
                # the cut relation contributes only the generator itself
                col[base + i] = 1
            else:
                for j in rel.rhs:
                    if not 0 <= j < fam.size:
                        raise ValueError(f"relation rhs index {j} outside family {fam.name!r}")
                    col[base + j] += 1
            sigma[:, base + i] = col % ell
    return ZModule(ell, total, FpMatrix(ell, sigma))


@dataclass(frozen=True)
class RoundtripReport:
    predicted: Tuple[int, ...]
    actual: Tuple[int, ...]
    mismatches: Tuple[Tuple[int, int, int], ...]  # (index, predicted, actual)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def roundtrip_check(budget: PresentationBudget) -> RoundtripReport:
    """emit -> realize -> invariants, against the budget's prediction:
    level k contributes at index ell^k - 1, a free family at index T - 1.
    A mismatch is a failing report, not an exception."""
    module = realize(emit(budget))
    actual = ulm_invariants(module)
    predicted = [0] * module.dim
    for k, mult in budget.cyclic_mult.items():
        if mult:
            predicted[budget.ell**k - 1] += mult
    if budget.free_mult:
        predicted[budget.truncation - 1] += budget.free_mult
    mismatches = tuple(
        (i, predicted[i], actual[i]) for i in range(module.dim) if predicted[i] != actual[i]
    )
    return RoundtripReport(tuple(predicted), tuple(actual), mismatches)


def format_text(pres: Presentation) -> str:
    """Human-readable relation listing."""
    lines: List[str] = []
    for fam in pres.families:
        if fam.kind == "cyclic":
            lines.append(f"family {fam.name}: cyclic level {fam.level}, generators x0..x{fam.size - 1}")
        else:
            lines.append(f"family {fam.name}: free, truncated at length {fam.level}")
        for rel in pres.relations:
            if rel.family != fam.name:
                continue
            if rel.kind == "truncated":
                lines.append(f"  x{rel.index}^s = x{rel.index} * [truncated tail]")
            else:
                rhs = " ".join(f"x{j}" for j in rel.rhs)
                lines.append(f"  x{rel.index}^s = {rhs}")
    if not pres.families:
        lines.append("(empty presentation)")
    return "\n".join(lines) + "\n"
