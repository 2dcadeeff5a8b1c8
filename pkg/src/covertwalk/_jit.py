"""Backend selection for the hot simulation kernels.

Set ``COVERTWALK_DISABLE_NUMBA=1`` to force the pure-numpy path. When numba is
not importable the numpy path is used automatically.
"""
import os

_DISABLED = os.environ.get("COVERTWALK_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError("numba disabled by COVERTWALK_DISABLE_NUMBA")
    import numba
    from numba import njit, prange

    if "NUMBA_THREADING_LAYER" not in os.environ:
        # skip the TBB probe; kernels are launched from one thread at a time
        numba.config.THREADING_LAYER = "workqueue"

    HAS_NUMBA = True
except ImportError:
    numba = None
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrapper(func):
            return func

        return wrapper

    prange = range


def default_backend():
    return "numba" if HAS_NUMBA else "numpy"


def max_threads():
    if HAS_NUMBA:
        return numba.config.NUMBA_NUM_THREADS
    return os.cpu_count() or 1
