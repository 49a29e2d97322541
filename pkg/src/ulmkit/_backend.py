"""Kernel backend selection.

ULMKIT_BACKEND=numba (default when numba imports) uses the JIT kernels,
ULMKIT_BACKEND=numpy forces the pure-numpy fallback. Both expose the same
five functions: rref, rank, nullspace, solve, inv.
"""

import os

_requested = os.environ.get("ULMKIT_BACKEND", "").strip().lower()

if _requested not in ("", "numba", "numpy"):
    raise RuntimeError(f"ULMKIT_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

if _requested == "numpy":
    from . import _kernels_numpy as _k
    BACKEND = "numpy"
else:
    try:
        from . import _kernels_numba as _k
        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        from . import _kernels_numpy as _k
        BACKEND = "numpy"

rref = _k.rref
rank = _k.rank
nullspace = _k.nullspace
solve = _k.solve
inv = _k.inv
