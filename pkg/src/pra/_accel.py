"""JIT switch for the numeric kernels.

Kernels are written once in the numba-compatible subset of Python/numpy.
With numba present they are compiled by ``@njit``; setting the environment
variable ``PRA_DISABLE_NUMBA=1`` (or running without numba installed)
leaves them as plain Python functions operating on numpy arrays.
"""

import os

_DISABLED = os.environ.get("PRA_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError
    import numba as _numba
except ImportError:
    _numba = None

HAVE_NUMBA = _numba is not None
BACKEND = "numba" if HAVE_NUMBA else "python"


def njit(*args, **kwargs):
    """``numba.njit`` when enabled, identity decorator otherwise."""
    if HAVE_NUMBA:
        kwargs.setdefault("cache", True)
        return _numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda func: func
