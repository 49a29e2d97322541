import os
import subprocess
import sys

import numpy as np
import pytest

from ulmkit import _kernels_numba, _kernels_numpy


BACKENDS = {"numba": _kernels_numba, "numpy": _kernels_numpy}


def random_cases():
    rng = np.random.default_rng(99)
    for ell in (2, 3, 5, 7):
        for _ in range(10):
            rows = int(rng.integers(1, 9))
            cols = int(rng.integers(1, 9))
            yield ell, rng.integers(0, ell, size=(rows, cols)), rng


def test_backends_agree_on_rref_rank_nullspace():
    for ell, a, rng in random_cases():
        r1, p1, k1 = _kernels_numba.rref(a.copy(), ell)
        r2, p2, k2 = _kernels_numpy.rref(a.copy(), ell)
        assert np.array_equal(r1, r2)
        assert np.array_equal(p1, p2)
        assert k1 == k2
        assert _kernels_numba.rank(a.copy(), ell) == _kernels_numpy.rank(a.copy(), ell)
        n1 = _kernels_numba.nullspace(a.copy(), ell)
        n2 = _kernels_numpy.nullspace(a.copy(), ell)
        assert np.array_equal(n1, n2)


def test_backends_agree_on_solve():
    rng = np.random.default_rng(7)
    for ell in (2, 5):
        for _ in range(20):
            rows, cols = rng.integers(1, 8, size=2)
            a = rng.integers(0, ell, size=(rows, cols))
            b = rng.integers(0, ell, size=rows)
            ok1, x1 = _kernels_numba.solve(a.copy(), b.copy(), ell)
            ok2, x2 = _kernels_numpy.solve(a.copy(), b.copy(), ell)
            assert ok1 == ok2
            if ok1:
                assert np.array_equal(x1, x2)
                assert np.array_equal((a @ x1) % ell, b % ell)


def test_backends_agree_on_inv():
    rng = np.random.default_rng(13)
    for ell in (2, 3):
        for _ in range(20):
            n = int(rng.integers(1, 7))
            a = rng.integers(0, ell, size=(n, n))
            ok1, i1 = _kernels_numba.inv(a.copy(), ell)
            ok2, i2 = _kernels_numpy.inv(a.copy(), ell)
            assert ok1 == ok2
            if ok1:
                assert np.array_equal(i1, i2)


@pytest.mark.parametrize("backend", ["numba", "numpy"])
def test_env_flag_selects_backend(backend):
    env = dict(os.environ, ULMKIT_BACKEND=backend)
    proc = subprocess.run(
        [sys.executable, "-c",
         "from ulmkit._backend import BACKEND;"
         "from ulmkit.ulm import decompose, jordan_multiplicities;"
         "from ulmkit.zmodule import random_module_with_type;"
         "m, t = random_module_with_type(3, 9, 5);"
         "assert decompose(m).block_sizes() == t;"
         "print(BACKEND)"],
        capture_output=True, text=True, env=env,
    )
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip() == backend


def test_env_flag_rejects_unknown():
    env = dict(os.environ, ULMKIT_BACKEND="fortran")
    proc = subprocess.run(
        [sys.executable, "-c", "import ulmkit"],
        capture_output=True, text=True, env=env,
    )
    assert proc.returncode != 0
