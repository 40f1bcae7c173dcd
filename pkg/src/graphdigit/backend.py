"""Kernel backend selection.

The hot kernels (erosion, dilation, labeling, ZNCC) exist twice: a numba
@njit build and a pure-numpy build with identical semantics.  Selection
order:

* ``GRAPHDIGIT_BACKEND=numpy``  force the pure-numpy path;
* ``GRAPHDIGIT_BACKEND=numba``  require numba (ImportError if missing);
* unset/auto                    numba when importable, numpy otherwise.

``benchmarks/bench_backends.py`` compares the two.
"""

from __future__ import annotations

import os

_ENV_VAR = "GRAPHDIGIT_BACKEND"


def _load_numba_kernels():
    from . import _kernels_numba

    return _kernels_numba


def _load_numpy_kernels():
    from . import _kernels_numpy

    return _kernels_numpy


def _resolve():
    choice = os.environ.get(_ENV_VAR, "auto").strip().lower() or "auto"
    if choice == "numpy":
        return _load_numpy_kernels()
    if choice == "numba":
        return _load_numba_kernels()
    if choice == "auto":
        try:
            return _load_numba_kernels()
        except ImportError:
            return _load_numpy_kernels()
    raise ValueError(f"{_ENV_VAR} must be 'numba', 'numpy' or 'auto', got {choice!r}")


kernels = _resolve()


def backend_name() -> str:
    return kernels.NAME
