import pytest

from ulmkit.localarith import (
    CharacterSpec,
    CycloContext,
    LocalPlace,
    global_height,
    local_height_interval,
    local_index,
    place_over,
    sieve_Pk,
    ulm_spectrum,
    v_adic,
)
from ulmkit.zmodule import INFINITY


CTX3 = CycloContext(3)


def test_context_rejects_two_and_bad_s():
    with pytest.raises(ValueError):
        CycloContext(2)
    with pytest.raises(ValueError):
        CycloContext(9)
    with pytest.raises(ValueError):
        CycloContext(3, s=2)


def test_local_index_examples():
    assert local_index(7, CTX3) == 0  # v_3(6) = 1
    assert local_index(19, CTX3) == 1  # v_3(18) = 2
    assert local_index(109, CTX3) == 2  # v_3(108) = 3


def test_local_index_rejects_wild_and_composite():
    with pytest.raises(ValueError):
        local_index(3, CTX3)
    with pytest.raises(ValueError):
        local_index(15, CTX3)


def test_sieve_examples():
    assert sieve_Pk(CTX3, 0, 20) == [7, 13]
    assert sieve_Pk(CTX3, 1, 200) == [19, 37, 73, 127, 181, 199]
    assert sieve_Pk(CTX3, 2, 120) == [109]


def test_sieve_partition_property():
    # the P_k partition the primes p <= bound with v_3(p-1) >= 1
    bound = 3000
    union = []
    for k in range(8):
        union.extend(sieve_Pk(CTX3, k, bound))
    assert len(union) == len(set(union))
    from ulmkit.localarith import _primes_upto

    expected = [p for p in _primes_upto(bound) if p != 3 and v_adic(3, p - 1) >= 1]
    assert sorted(union) == expected
    for k in range(8):
        for p in sieve_Pk(CTX3, k, bound):
            assert v_adic(3, p - 1) - 1 == k


def test_local_height_interval_unramified():
    place = place_over(19, CTX3, ramified=False)
    assert local_height_interval(place, 1) == INFINITY
    assert local_height_interval(place, 5) == INFINITY


def test_local_height_interval_point_for_m1():
    place = place_over(19, CTX3, ramified=True)  # t = 1
    assert local_height_interval(place, 1) == (2, 2)


def test_local_height_interval_window():
    place = place_over(19, CTX3, ramified=True)
    assert local_height_interval(place, 2) == (1, 2)
    wide = place_over(109, CTX3, ramified=True)  # t = 2
    assert local_height_interval(wide, 4) == (5, 8)


def test_interval_degenerates_exactly_at_m1():
    for p in (7, 19, 109):
        place = place_over(p, CTX3, ramified=True)
        lo, hi = local_height_interval(place, 1)
        assert lo == hi
        if place.t >= 1:
            lo2, hi2 = local_height_interval(place, 2)
            assert lo2 < hi2


def test_local_place_rejects_wild():
    with pytest.raises(ValueError):
        LocalPlace(ell=3, p=3, t=0, ramified=True)


def test_global_height_examples():
    assert global_height(CharacterSpec(CTX3, frozenset([19]))) == 2
    assert global_height(CharacterSpec(CTX3, frozenset([7, 19]))) == 0
    assert global_height(CharacterSpec(CTX3, frozenset([109]))) == 8


def test_global_height_interval_for_m2():
    lo, hi = global_height(CharacterSpec(CTX3, frozenset([19]), m=2))
    assert (lo, hi) == (1, 2)


def test_global_height_monotone_under_more_primes():
    base = frozenset([109])
    h0 = global_height(CharacterSpec(CTX3, base))
    for extra in (7, 13, 19, 163):
        h1 = global_height(CharacterSpec(CTX3, base | {extra}))
        assert h1 <= h0


def test_heights_have_spectrum_shape():
    for p in sieve_Pk(CTX3, 0, 500) + sieve_Pk(CTX3, 1, 500):
        h = global_height(CharacterSpec(CTX3, frozenset([p])))
        assert h in {3**k - 1 for k in range(8)}


def test_character_spec_validation():
    with pytest.raises(ValueError):
        CharacterSpec(CTX3, frozenset())  # no unramified nontrivial characters
    with pytest.raises(ValueError):
        CharacterSpec(CTX3, frozenset([5]))  # 5 != 1 mod 3
    with pytest.raises(ValueError):
        CharacterSpec(CTX3, frozenset([3]))  # wild
    with pytest.raises(ValueError):
        CharacterSpec(CTX3, frozenset([21]))  # composite


def test_spectrum_golden_ell3():
    spec = ulm_spectrum(CTX3, 10_000)
    assert {h: e.witness for h, e in spec.items()} == {
        0: 7, 2: 19, 8: 109, 26: 163, 80: 487, 242: 1459,
    }


def test_spectrum_small_bound():
    spec = ulm_spectrum(CTX3, 20)
    assert {h: e.witness for h, e in spec.items()} == {0: 7, 2: 19}


def test_spectrum_ell5():
    spec = ulm_spectrum(CycloContext(5), 1000)
    assert {h: e.witness for h, e in spec.items()} == {0: 11, 4: 101, 24: 251}


def test_spectrum_threaded_matches(monkeypatch):
    monkeypatch.setenv("ULMKIT_THREADS", "4")
    spec = ulm_spectrum(CTX3, 10_000)
    assert {h: e.witness for h, e in spec.items()}[242] == 1459
