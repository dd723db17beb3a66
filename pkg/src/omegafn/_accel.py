"""numba switch.

Set ``OMEGAFN_DISABLE_NUMBA=1`` to force the pure-numpy kernels, e.g. for
debugging or on platforms without numba.
"""
import os

_disabled = os.environ.get("OMEGAFN_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _disabled:
        raise ImportError
    import numba

    HAVE_NUMBA = True
except ImportError:
    numba = None
    HAVE_NUMBA = False


def njit(func):
    """``numba.njit(cache=True)`` when numba is enabled, identity otherwise."""
    if HAVE_NUMBA:
        return numba.njit(cache=True)(func)
    return func
