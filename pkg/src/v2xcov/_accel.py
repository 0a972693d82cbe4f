"""Optional numba acceleration.

Set ``V2XCOV_DISABLE_NUMBA=1`` to force the pure-numpy kernels. The flag is
read once at import time.
"""
from __future__ import annotations

import os

_FALSEY = {"", "0", "false", "no", "off"}

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("V2XCOV_DISABLE_NUMBA", "").strip().lower() in _FALSEY


def njit(func):
    """Compile ``func`` in nopython mode when numba is installed.

    Without numba the function is returned untouched; it is still callable
    (slowly) as plain Python, which is what the benchmark compares against.
    """
    if not HAVE_NUMBA:
        return func
    return numba.njit(cache=True, nogil=True)(func)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
