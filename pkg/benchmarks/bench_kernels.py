"""Benchmark the JIT kernels against the pure-numpy fallback.

Times the raw elimination kernels and a decomposition-shaped workload on
both backends and prints a comparison table. Run from the repo root:

    python benchmarks/bench_kernels.py
"""

import os
import subprocess
import sys
import time

import numpy as np

from ulmkit import _kernels_numba, _kernels_numpy

BACKENDS = {"numba": _kernels_numba, "numpy": _kernels_numpy}


def bench_rref(mod, ell=3, dim=40, reps=400):
    rng = np.random.default_rng(0)
    mats = [rng.integers(0, ell, size=(dim, 2 * dim)) for _ in range(reps)]
    mod.rref(mats[0].copy(), ell)  # warm-up / JIT compile
    t0 = time.perf_counter()
    for a in mats:
        mod.rref(a.copy(), ell)
    return time.perf_counter() - t0


def bench_solve(mod, ell=2, dim=6, reps=20000):
    rng = np.random.default_rng(1)
    a = rng.integers(0, ell, size=(dim, dim))
    bs = [rng.integers(0, ell, size=dim) for _ in range(reps)]
    mod.solve(a.copy(), bs[0].copy(), ell)
    t0 = time.perf_counter()
    for b in bs:
        mod.solve(a, b, ell)
    return time.perf_counter() - t0


def bench_decompose(backend, count=100):
    """Full decomposition batch in a subprocess pinned to one backend."""
    code = (
        "import time\n"
        "from ulmkit.ulm import decompose, jordan_multiplicities\n"
        "from ulmkit.zmodule import random_module_with_type\n"
        "m, _ = random_module_with_type(3, 20, 0)\n"
        "decompose(m)  # warm-up\n"
        "t0 = time.perf_counter()\n"
        f"for i in range({count}):\n"
        "    ell = (2, 3, 5, 7)[i % 4]\n"
        "    m, t = random_module_with_type(ell, 1 + i % 40, 1000 + i)\n"
        "    assert decompose(m).block_sizes() == t\n"
        "print(time.perf_counter() - t0)\n"
    )
    env = dict(os.environ, ULMKIT_BACKEND=backend)
    proc = subprocess.run([sys.executable, "-c", code], capture_output=True,
                          text=True, env=env, check=True)
    return float(proc.stdout.strip())


def main():
    print(f"{'workload':<34}{'numba':>10}{'numpy':>10}{'speedup':>9}")
    rows = [
        ("rref 40x80 mod 3, 400 reps", bench_rref),
        ("solve 6x6 mod 2, 20000 reps", bench_solve),
    ]
    for name, fn in rows:
        t_nb = fn(_kernels_numba)
        t_np = fn(_kernels_numpy)
        print(f"{name:<34}{t_nb:>9.3f}s{t_np:>9.3f}s{t_np / t_nb:>8.1f}x")
    t_nb = bench_decompose("numba")
    t_np = bench_decompose("numpy")
    name = "decompose batch, 100 modules"
    print(f"{name:<34}{t_nb:>9.3f}s{t_np:>9.3f}s{t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
