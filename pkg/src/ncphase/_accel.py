"""Numba switch for the hot kernels.

Set ``NCPHASE_DISABLE_NUMBA=1`` before import to run the pure-numpy path.
"""
import os

_disabled = os.environ.get("NCPHASE_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

USE_NUMBA = numba is not None and not _disabled

numba_default = {
    "nogil": True,
    "cache": True,
    "fastmath": False,
    "boundscheck": False,
    "error_model": "numpy",
}


def jit(func):
    """Compile ``func`` with numba when enabled, otherwise return it untouched."""
    if USE_NUMBA:
        return numba.njit(**numba_default)(func)
    return func
