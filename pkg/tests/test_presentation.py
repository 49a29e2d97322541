import numpy as np
import pytest

from ulmkit.presentation import (
    Presentation,
    PresentationBudget,
    Relation,
    emit,
    format_text,
    realize,
    roundtrip_check,
)
from ulmkit.ulm import jordan_multiplicities
from ulmkit.zmodule import direct_sum, make_cyclic, make_group_algebra, sigma_power_exponent


def test_emit_level_zero_fixed_generator():
    pres = emit(PresentationBudget(ell=3, cyclic_mult={0: 1}))
    assert len(pres.families) == 1 and pres.families[0].size == 1
    assert [(r.index, r.rhs, r.kind) for r in pres.relations] == [(0, (0,), "wraparound")]


def test_emit_cyclic_level_one():
    pres = emit(PresentationBudget(ell=3, max_level=1, cyclic_mult={1: 1}))
    assert [(r.index, r.rhs, r.kind) for r in pres.relations] == [
        (0, (1,), "chain"), (1, (2,), "chain"), (2, (0,), "wraparound"),
    ]


def test_emit_free_truncated():
    pres = emit(PresentationBudget(ell=2, free_mult=1, truncation=3))
    assert [(r.index, r.rhs, r.kind) for r in pres.relations] == [
        (0, (1, 0), "chain"), (1, (2, 1), "chain"), (2, (), "truncated"),
    ]


def test_relation_counts_match_family_sizes():
    budget = PresentationBudget(ell=3, max_level=2, cyclic_mult={0: 2, 1: 1, 2: 1},
                                free_mult=2, truncation=4)
    pres = emit(budget)
    for fam in pres.families:
        rels = [r for r in pres.relations if r.family == fam.name]
        assert len(rels) == fam.size
        if fam.kind == "free":
            assert sum(1 for r in rels if r.kind == "truncated") == 1
            assert sum(1 for r in rels if r.kind == "chain") == fam.size - 1


def test_metadata_carries_annotations():
    pres = emit(PresentationBudget(ell=3, cyclic_mult={0: 1}, is_countable=True))
    assert pres.metadata["is_countable"] is True
    assert pres.metadata["above_level_families"] == "opaque"


def test_realize_cyclic_family_is_group_algebra():
    pres = emit(PresentationBudget(ell=3, max_level=1, cyclic_mult={1: 1}))
    assert realize(pres).sigma == make_group_algebra(3, 1).sigma


def test_realize_trivial_families():
    pres = emit(PresentationBudget(ell=5, cyclic_mult={0: 2}))
    mod = realize(pres)
    assert mod.dim == 2 and np.array_equal(mod.sigma.a, np.eye(2))


def test_realize_free_family_is_chain_module():
    pres = emit(PresentationBudget(ell=2, free_mult=1, truncation=4))
    assert realize(pres).sigma == make_cyclic(2, 4).sigma


def test_realize_rejects_malformed():
    pres = emit(PresentationBudget(ell=3, max_level=1, cyclic_mult={1: 1}))
    broken = Presentation(
        pres.ell, pres.families, pres.relations[:-1], pres.metadata
    )
    with pytest.raises(ValueError):
        realize(broken)
    dangling = Presentation(
        pres.ell, pres.families,
        pres.relations[:-1] + (Relation("nope", 0, (0,), "chain"),),
        pres.metadata,
    )
    with pytest.raises(ValueError):
        realize(dangling)


def test_roundtrip_examples():
    rep = roundtrip_check(PresentationBudget(ell=3, max_level=1, cyclic_mult={0: 1, 1: 1}))
    assert rep.ok and rep.predicted == (1, 0, 1, 0)

    empty = roundtrip_check(PresentationBudget(ell=3))
    assert empty.ok and empty.predicted == ()

    free = roundtrip_check(PresentationBudget(ell=2, free_mult=2, truncation=5))
    assert free.ok and free.actual[4] == 2


def test_union_of_budgets_matches_direct_sum():
    b1 = PresentationBudget(ell=3, max_level=1, cyclic_mult={1: 1})
    b2 = PresentationBudget(ell=3, free_mult=1, truncation=2)
    merged = PresentationBudget(ell=3, max_level=1, cyclic_mult={1: 1},
                                free_mult=1, truncation=2)
    lhs = realize(emit(merged))
    rhs = direct_sum(realize(emit(b1)), realize(emit(b2)))
    assert jordan_multiplicities(lhs) == jordan_multiplicities(rhs)


def test_cyclic_family_fixed_by_exact_power():
    for ell in (2, 3):
        for k in (1, 2):
            mod = realize(emit(PresentationBudget(ell=ell, max_level=k, cyclic_mult={k: 1})))
            assert sigma_power_exponent(mod) == k


def test_budget_validation():
    with pytest.raises(ValueError):
        PresentationBudget(ell=4)
    with pytest.raises(ValueError):
        PresentationBudget(ell=3, truncation=0)
    with pytest.raises(ValueError):
        PresentationBudget(ell=3, cyclic_mult={1: 1})  # level above max_level
    with pytest.raises(ValueError):
        PresentationBudget(ell=3, cyclic_mult={0: -1})


def test_format_text_lists_relations():
    text = format_text(emit(PresentationBudget(ell=3, max_level=1, cyclic_mult={1: 1},
                                               free_mult=1, truncation=3)))
    assert "x0^s = x1" in text
    assert "truncated tail" in text
    assert format_text(emit(PresentationBudget(ell=3))).strip() == "(empty presentation)"
