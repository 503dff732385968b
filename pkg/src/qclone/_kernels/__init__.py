"""Numerical kernels with a compiled core and a pure-Python fallback.

The compiled Cython module is used when it was built; otherwise the
pure-Python implementation is selected at import time.  Both expose
``symmetric_eigenvalues(a, tol, max_sweeps)``.
"""

from __future__ import annotations

from . import _jacobi_py

try:
    from . import _jacobi_ext
except ImportError:  # extension not built
    _jacobi_ext = None

BACKENDS = {"python": _jacobi_py.symmetric_eigenvalues}
if _jacobi_ext is not None:
    BACKENDS["cython"] = _jacobi_ext.symmetric_eigenvalues

_active = "cython" if "cython" in BACKENDS else "python"


def backend() -> str:
    return _active


def set_backend(name: str) -> None:
    global _active
    if name not in BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}")
    _active = name


def symmetric_eigenvalues(a, tol: float = _jacobi_py.OFF_TOL, max_sweeps: int = _jacobi_py.MAX_SWEEPS):
    return BACKENDS[_active](a, tol, max_sweeps)
