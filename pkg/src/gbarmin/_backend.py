"""Kernel backend selection.

The hot kernels exist twice: numba-jitted (default) and pure numpy/Python.
Set ``GBARMIN_BACKEND=numpy`` to force the fallback, ``GBARMIN_BACKEND=numba``
to require the jitted path (raising if numba is unavailable).  Both backends
produce bit-identical results; ``python -m gbarmin.bench`` compares their
throughput.
"""

import os
import warnings

ENV_VAR = "GBARMIN_BACKEND"

_KERNEL_NAMES = (
    "generate_bits",
    "count_windows",
    "nist_multimcw",
    "nist_lag",
    "nist_multimmc",
    "nist_lz78y",
)


def _numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def backend_name() -> str:
    """Resolve the active backend from the environment."""
    raw = os.environ.get(ENV_VAR, "").strip().lower()
    if raw == "numpy":
        return "numpy"
    if raw == "numba":
        if not _numba_available():
            raise RuntimeError(
                f"{ENV_VAR}=numba requested but numba is not importable"
            )
        return "numba"
    if raw:
        raise ValueError(f"{ENV_VAR} must be 'numba' or 'numpy', got {raw!r}")
    if _numba_available():
        return "numba"
    warnings.warn("numba unavailable; falling back to the pure-numpy kernels")
    return "numpy"


def load_backend(name: str | None = None):
    """Import and return the kernel module for ``name`` (or the active one)."""
    name = name or backend_name()
    if name == "numba":
        from . import _kernels_numba as mod
    elif name == "numpy":
        from . import _kernels_numpy as mod
    else:
        raise ValueError(f"unknown backend {name!r}")
    return mod


def kernel(func_name: str):
    """Look up one kernel function on the active backend."""
    if func_name not in _KERNEL_NAMES:
        raise KeyError(func_name)
    return getattr(load_backend(), func_name)
