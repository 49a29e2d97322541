import numpy as np
import pytest

from ulmkit import linalg
from ulmkit.linalg import FpMatrix, from_rows, identity, zeros


def test_rref_zero_matrix():
    r, piv, rk = linalg.rref(zeros(3, 2, 2))
    assert np.array_equal(r.a, np.zeros((2, 2)))
    assert piv == [] and rk == 0


def test_rref_identity():
    r, piv, rk = linalg.rref(identity(2, 3))
    assert np.array_equal(r.a, np.eye(3))
    assert piv == [0, 1, 2] and rk == 3


def test_rref_hand_example_mod5():
    # hand Gaussian elimination: second row is 2x the first mod 5
    r, piv, rk = linalg.rref(from_rows(5, [[1, 2], [2, 4]]))
    assert r.a.tolist() == [[1, 2], [0, 0]]
    assert rk == 1


def test_rref_idempotent():
    rng = np.random.default_rng(0)
    for ell in (2, 3, 5):
        for _ in range(20):
            m = FpMatrix(ell, rng.integers(0, ell, size=(4, 6)))
            r, _, _ = linalg.rref(m)
            r2, _, _ = linalg.rref(r)
            assert r == r2


def test_kernel_identity_empty():
    assert linalg.kernel_basis(identity(3, 4)) == []


def test_kernel_zero_matrix_standard_basis():
    vecs = linalg.kernel_basis(zeros(2, 2, 3))
    assert [v.tolist() for v in vecs] == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


def test_kernel_mod2_enumeration_oracle():
    m = from_rows(2, [[1, 1]])
    vecs = linalg.kernel_basis(m)
    # oracle: enumerate all 4 vectors of F_2^2
    expected = {(x, y) for x in range(2) for y in range(2) if (x + y) % 2 == 0}
    got = set()
    for c in range(2):
        for d in range(2):
            v = (c * vecs[0] + d * (vecs[1] if len(vecs) > 1 else 0)) % 2
            got.add(tuple(int(t) for t in np.atleast_1d(v)))
    assert len(vecs) == 1 and tuple(vecs[0]) == (1, 1)
    assert got == expected


def test_rank_nullity():
    rng = np.random.default_rng(1)
    for ell in (2, 3, 5, 7):
        for _ in range(25):
            rows, cols = rng.integers(1, 8, size=2)
            m = FpMatrix(ell, rng.integers(0, ell, size=(rows, cols)))
            assert linalg.rank(m) + len(linalg.kernel_basis(m)) == cols


def test_solve_identity():
    b = np.array([2, 0, 1])
    assert np.array_equal(linalg.solve(identity(3, 3), b), b)


def test_solve_free_variable_convention():
    # enumeration oracle: (1,0) and (0,1) both solve; rref convention picks (1,0)
    x = linalg.solve(from_rows(2, [[1, 1]]), np.array([1]))
    assert x.tolist() == [1, 0]


def test_solve_inconsistent():
    assert linalg.solve(zeros(3, 2, 2), np.array([1, 0])) is None


def test_solve_dimension_mismatch():
    with pytest.raises(ValueError):
        linalg.solve(identity(3, 3), np.array([1, 2]))


def test_solve_random_verifies():
    rng = np.random.default_rng(2)
    for ell in (2, 3, 5):
        for _ in range(30):
            rows, cols = rng.integers(1, 7, size=2)
            a = FpMatrix(ell, rng.integers(0, ell, size=(rows, cols)))
            x0 = rng.integers(0, ell, size=cols)
            b = (a.a @ x0) % ell
            x = linalg.solve(a, b)
            assert x is not None
            assert np.array_equal((a.a @ x) % ell, b)


def test_fpmatrix_requires_prime():
    with pytest.raises(ValueError):
        FpMatrix(4, np.zeros((1, 1), dtype=np.int64))
    with pytest.raises(ValueError):
        FpMatrix(1, np.zeros((1, 1), dtype=np.int64))


def test_fpmatrix_reduces_entries():
    m = FpMatrix(3, np.array([[4, -1], [3, 5]]))
    assert m.a.tolist() == [[1, 2], [0, 2]]


def test_invert_round_trip():
    rng = np.random.default_rng(3)
    for ell in (2, 5):
        count = 0
        while count < 10:
            a = FpMatrix(ell, rng.integers(0, ell, size=(4, 4)))
            inv = linalg.invert(a)
            if inv is None:
                continue
            count += 1
            assert np.array_equal((a.a @ inv.a) % ell, np.eye(4) % ell)


def test_intersection_and_span_helpers():
    ell = 3
    a = from_rows(ell, [[1, 0], [0, 1], [0, 0]])  # span(e1, e2)
    b = from_rows(ell, [[0, 0], [1, 0], [0, 1]])  # span(e2, e3)
    inter = linalg.intersect_columns(a, b)
    assert inter.cols == 1
    assert linalg.in_span(inter, np.array([0, 1, 0]))
    assert linalg.same_span(inter, from_rows(ell, [[0], [1], [0]]))
    assert linalg.span_contains(a, inter)
    assert not linalg.span_contains(inter, a)


def test_is_prime():
    assert [n for n in range(50) if linalg.is_prime(n)] == [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47,
    ]
    assert linalg.is_prime(2**61 - 1)
    assert not linalg.is_prime(2**61 + 1)
