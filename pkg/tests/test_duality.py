import numpy as np
import pytest

from ulmkit import linalg
from ulmkit.duality import (
    DualElement,
    basic_lemma_membership,
    cyclic_envelope,
    dual_hom,
    dualize,
    generates_dual,
)
from ulmkit.linalg import FpMatrix
from ulmkit.ulm import decompose, ulm_invariants
from ulmkit.zmodule import (
    aug_power,
    compose,
    element_height,
    identity_hom,
    make_cyclic,
    natural_projection,
    random_module,
)


def all_functionals(ell, n):
    for code in range(ell**n):
        yield np.array([(code // ell**j) % ell for j in range(n)], dtype=np.int64)


def test_dualize_trivial_action():
    m = make_cyclic(3, 1)
    assert dualize(m).sigma == m.sigma


def test_double_dual_exact():
    for seed in range(10):
        m = random_module(5, 6, seed)
        assert dualize(dualize(m)).sigma == m.sigma


def test_dual_of_cyclic_is_cyclic():
    for ell, n in ((2, 4), (3, 3)):
        d = dualize(make_cyclic(ell, n))
        assert decompose(d).block_sizes() == (n,)


def test_dual_preserves_ulm():
    for seed in range(10):
        m = random_module(3, 7, seed)
        assert ulm_invariants(m) == ulm_invariants(dualize(m))


def test_dual_hom_of_identity():
    m = make_cyclic(3, 3)
    d = dual_hom(identity_hom(m))
    assert np.array_equal(d.A.a, np.eye(3))


def test_dual_of_projection_image():
    # the dual of pi_{n,m} is injective with image the depth n-m filtration step
    for (ell, n, m) in ((2, 4, 2), (3, 3, 1)):
        pi = natural_projection(ell, n, m)
        star = dual_hom(pi)
        assert star.is_injective()
        image = linalg.column_space(star.A)
        assert linalg.same_span(image, aug_power(dualize(make_cyclic(ell, n)), n - m))


def test_dual_contravariant():
    # (g . f)* = f* . g* on compositions of projections and envelope maps
    f = natural_projection(3, 4, 3)
    g = natural_projection(3, 3, 1)
    lhs = dual_hom(compose(g, f))
    rhs = compose(dual_hom(f), dual_hom(g))
    assert lhs.A == rhs.A
    for seed in range(6):
        m = random_module(2, 4, seed)
        coeffs = np.random.default_rng(seed).integers(0, 2, size=4)
        if not coeffs.any():
            continue
        size, psi = cyclic_envelope(DualElement(m, coeffs))
        if size < 1:
            continue
        pi = natural_projection(2, size, max(size - 1, 0))
        lhs = dual_hom(compose(pi, psi))
        rhs = compose(dual_hom(psi), dual_hom(pi))
        assert lhs.A == rhs.A


def test_basic_lemma_zero_functional():
    v = make_cyclic(3, 4)
    z = DualElement(v, np.zeros(4, dtype=np.int64))
    for k in range(6):
        assert basic_lemma_membership(z, k)


def test_basic_lemma_v2_mod2_enumeration():
    # of the 4 functionals on V_2 over F_2, exactly 2 lie in I V_2-hat and they
    # are exactly the ones vanishing on I^1 V_2
    v2 = make_cyclic(2, 2)
    dual = dualize(v2)
    step = aug_power(v2, 1)
    in_depth_one = []
    vanishing = []
    for coeffs in all_functionals(2, 2):
        f = DualElement(v2, coeffs)
        if basic_lemma_membership(f, 1):
            in_depth_one.append(tuple(coeffs))
        if not ((coeffs @ step.a) % 2).any():
            vanishing.append(tuple(coeffs))
    assert len(in_depth_one) == 2
    assert in_depth_one == vanishing


def test_basic_lemma_exhaustive_small():
    for ell in (2, 3):
        for n in range(1, 5):
            vn = make_cyclic(ell, n)
            dual = dualize(vn)
            for coeffs in all_functionals(ell, n):
                f = DualElement(vn, coeffs)
                h = element_height(dual, coeffs)
                for k in range(n + 1):
                    member = basic_lemma_membership(f, k)
                    assert member == (h >= k)


def test_generator_criterion_exhaustive():
    # f generates iff f does not vanish on the deepest filtration step
    for ell in (2, 3):
        for n in range(1, 5):
            vn = make_cyclic(ell, n)
            deepest = aug_power(vn, n - 1)
            for coeffs in all_functionals(ell, n):
                f = DualElement(vn, coeffs)
                by_span = generates_dual(f)
                by_criterion = bool(((coeffs @ deepest.a) % ell).any())
                assert by_span == by_criterion


def test_basic_lemma_rejects_non_cyclic_base():
    m = random_module(2, 4, seed=8)
    if m.sigma != make_cyclic(2, 4).sigma:
        f = DualElement(m, np.array([1, 0, 0, 0]))
        with pytest.raises(ValueError):
            basic_lemma_membership(f, 1)


def test_cyclic_envelope_zero():
    m = make_cyclic(3, 3)
    size, psi = cyclic_envelope(DualElement(m, np.zeros(3, dtype=np.int64)))
    assert size == 0 and psi.A.a.shape == (0, 3)


def test_cyclic_envelope_generator_is_identity():
    # the generator functional (dual to the socle) realizes the identity map
    v4 = make_cyclic(3, 4)
    eta = DualElement(v4, np.array([0, 0, 0, 1]))
    size, psi = cyclic_envelope(eta)
    assert size == 4
    assert np.array_equal(psi.A.a, np.eye(4))


def test_cyclic_envelope_recovers_eta():
    # composing with the last-coordinate functional recovers eta
    rng = np.random.default_rng(6)
    for seed in range(10):
        m = random_module(2, 5, seed)
        coeffs = rng.integers(0, 2, size=5)
        if not coeffs.any():
            continue
        size, psi = cyclic_envelope(DualElement(m, coeffs))
        assert psi.is_surjective()
        assert np.array_equal(psi.A.a[size - 1], coeffs % 2)


def test_cyclic_envelope_kernel_identity():
    # ker(psi) equals the intersection of the action-translates of ker(eta)
    for seed in range(10):
        m = random_module(3, 5, seed + 30)
        rng = np.random.default_rng(seed)
        coeffs = rng.integers(0, 3, size=5)
        if not coeffs.any():
            continue
        size, psi = cyclic_envelope(DualElement(m, coeffs))
        ker_psi = linalg.kernel_basis(psi.A)
        rows = []
        power = np.eye(5, dtype=np.int64)
        for _ in range(size):
            rows.append((coeffs @ power) % 3)
            power = (power @ m.sigma.a) % 3
        stacked = FpMatrix(3, np.stack(rows, axis=0))
        ker_translates = linalg.kernel_basis(stacked)

        def span(vecs):
            if not vecs:
                return linalg.zeros(3, 5, 0)
            return FpMatrix(3, np.stack(vecs, axis=1))

        assert linalg.same_span(span(ker_psi), span(ker_translates))
