"""Optional numba acceleration.

Set ``K2U_DISABLE_JIT=1`` to force the pure-numpy kernels even when numba is
installed. The flag is read once, at import time.
"""

import os

JIT_REQUESTED = os.environ.get("K2U_DISABLE_JIT", "").strip().lower() not in (
    "1",
    "true",
    "yes",
    "on",
)

try:
    import numba as _nb

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _nb = None
    HAVE_NUMBA = False

JIT_ENABLED = JIT_REQUESTED and HAVE_NUMBA


def njit(*args, **kwargs):
    if HAVE_NUMBA:
        return _nb.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda func: func
