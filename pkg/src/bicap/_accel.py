"""Backend selection for the compiled kernels.

Set ``BICAP_BACKEND=numpy`` to force the pure-numpy code paths even when
numba is importable. Any other value (or no value) uses numba if present.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

BACKEND_ENV = "BICAP_BACKEND"

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get(BACKEND_ENV, "numba").lower() != "numpy"


def njit(func):
    """Compile ``func`` with numba if available, else return it untouched."""
    if not HAVE_NUMBA:
        return func
    return numba.njit(cache=True, nogil=True)(func)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
