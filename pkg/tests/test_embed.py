import numpy as np
import pytest

from ulmkit import linalg
from ulmkit.duality import DualElement, cyclic_envelope, dualize
from ulmkit.embed import (
    ModuleEP,
    exhaustive_lift_exists,
    exhaustive_lift_exists_rows,
    hom_height,
    quotient_of_free,
    solve_module_ep,
)
from ulmkit.linalg import FpMatrix
from ulmkit.zmodule import (
    ZHom,
    element_height,
    identity_hom,
    make_cyclic,
    make_group_algebra,
    natural_projection,
    random_module,
)


def test_solve_trivial_lift_is_phi():
    phi = natural_projection(2, 3, 2)
    ep = ModuleEP(phi, 2)
    witness = solve_module_ep(ep)
    assert witness is not None
    assert witness.psi.A == phi.A


def test_solve_projection_composition():
    # lifting pi_{3,1} to length 2 gives exactly pi_{3,2}
    phi = natural_projection(2, 3, 1)
    witness = solve_module_ep(ModuleEP(phi, 2))
    assert witness is not None
    assert witness.psi.A == natural_projection(2, 3, 2).A
    assert witness.surjective


def test_solve_identity_v2_to_v3_impossible():
    ep = ModuleEP(identity_hom(make_cyclic(2, 2)), 3)
    assert solve_module_ep(ep) is None
    # brute force over all 2^6 candidate matrices
    assert not exhaustive_lift_exists(ep)
    assert not exhaustive_lift_exists_rows(ep)


def test_solver_agrees_with_full_enumeration():
    rng = np.random.default_rng(9)
    for seed in range(15):
        m = random_module(2, 4, seed + 100)
        coeffs = rng.integers(0, 2, size=4)
        if not coeffs.any():
            continue
        size, psi = cyclic_envelope(DualElement(m, coeffs))
        for n in range(size, 5):
            ep = ModuleEP(psi, n)
            got = solve_module_ep(ep) is not None
            if 2 ** (n * 4) <= 2**20:
                assert got == exhaustive_lift_exists(ep)
            assert got == exhaustive_lift_exists_rows(ep)


def test_hom_height_projection_brute_force():
    # oracle: full-matrix lift searches for (ell, n, m) = (2, 3, 1)
    phi = natural_projection(2, 3, 1)
    assert exhaustive_lift_exists(ModuleEP(phi, 2))
    assert exhaustive_lift_exists(ModuleEP(phi, 3))
    assert hom_height(phi) == 2

    # (ell, n, m) = (3, 4, 2): full enumeration for the first lift, candidate
    # last rows (which determine every hom) for the rest
    phi = natural_projection(3, 4, 2)
    assert exhaustive_lift_exists(ModuleEP(phi, 3))
    assert exhaustive_lift_exists_rows(ModuleEP(phi, 4))
    assert hom_height(phi) == 2


def test_hom_height_identity_is_zero():
    assert hom_height(identity_hom(make_cyclic(3, 2))) == 0
    assert hom_height(identity_hom(make_cyclic(2, 4))) == 0


def test_hom_height_requires_surjective():
    v2, v1 = make_cyclic(2, 2), make_cyclic(2, 1)
    zero = ZHom(v2, v1, FpMatrix(2, [[0, 0]]))
    with pytest.raises(ValueError):
        hom_height(zero)


def test_hom_height_matches_dual_element_height():
    rng = np.random.default_rng(17)
    for seed in range(20):
        m = random_module(2, 6, seed + 400)
        dual = dualize(m)
        coeffs = rng.integers(0, 2, size=6)
        if not coeffs.any():
            continue
        size, psi = cyclic_envelope(DualElement(m, coeffs))
        assert hom_height(psi) == element_height(dual, coeffs)


def test_lifting_transitivity():
    rng = np.random.default_rng(23)
    for seed in range(10):
        m = random_module(3, 5, seed + 300)
        coeffs = rng.integers(0, 3, size=5)
        if not coeffs.any():
            continue
        size, psi = cyclic_envelope(DualElement(m, coeffs))
        h = hom_height(psi)
        for k in range(h + 1):
            assert solve_module_ep(ModuleEP(psi, size + k)) is not None


def test_hom_height_bound():
    for seed in range(10):
        m = random_module(2, 5, seed)
        coeffs = np.random.default_rng(seed).integers(0, 2, size=5)
        if not coeffs.any():
            continue
        size, psi = cyclic_envelope(DualElement(m, coeffs))
        assert hom_height(psi) <= m.dim - size


def test_quotient_of_free_trivial():
    r, mult, surj = quotient_of_free(make_cyclic(3, 1))
    assert (r, mult) == (0, 1)
    assert np.array_equal(surj.A.a, np.eye(1))


def test_quotient_of_free_group_algebra():
    g = make_group_algebra(2, 1)
    r, mult, surj = quotient_of_free(g)
    assert (r, mult) == (1, 1)
    assert np.array_equal(surj.A.a, np.eye(2))


def test_quotient_of_free_v2_mod3():
    # explicit matrix check: the presentation is the projection from the
    # 3-dimensional group algebra in its group basis
    r, mult, surj = quotient_of_free(make_cyclic(3, 2))
    assert (r, mult) == (1, 1)
    assert surj.A.a.tolist() == [[1, 1, 1], [0, 1, 2]]
    assert surj.src.sigma == make_group_algebra(3, 1).sigma
    # change to the chain basis of the source: the map becomes pi_{3,2}
    chain_basis = np.zeros((3, 3), dtype=np.int64)
    v = np.array([1, 0, 0], dtype=np.int64)
    x = surj.src.x.a
    for j in range(3):
        chain_basis[:, j] = v
        v = (x @ v) % 3
    transported = (surj.A.a @ chain_basis) % 3
    assert transported.tolist() == natural_projection(3, 3, 2).A.a.tolist()


def test_quotient_of_free_minimality():
    for seed in range(15):
        for ell in (2, 5):
            m = random_module(ell, 7, seed + 40)
            r, mult, surj = quotient_of_free(m)
            assert surj.is_surjective()
            assert mult == m.dim - linalg.rank(m.x)
            assert surj.src.dim == mult * ell**r


def test_module_ep_validation():
    with pytest.raises(ValueError):
        ModuleEP(natural_projection(2, 3, 2), 1)  # n < m
    v2, v1 = make_cyclic(2, 2), make_cyclic(2, 1)
    nonsurj = ZHom(v2, v1, FpMatrix(2, [[0, 0]]))
    with pytest.raises(ValueError):
        ModuleEP(nonsurj, 2)


def test_exhaustive_budget_guard():
    phi = natural_projection(3, 4, 2)
    with pytest.raises(ValueError):
        exhaustive_lift_exists(ModuleEP(phi, 4), budget=100)
