"""Kernel backend selection: numba JIT by default, pure numpy on request.

Set the environment variable ``EIGENPSD_DISABLE_NUMBA=1`` before import to
run every kernel as plain Python/numpy. The fallback executes the exact same
source, so results agree; it is much slower on long signals and exists for
debugging, portability, and benchmarking.
"""

import os

DISABLE_ENV = "EIGENPSD_DISABLE_NUMBA"

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    _HAVE_NUMBA = False

_flag = os.environ.get(DISABLE_ENV, "0").strip().lower()
NUMBA_ENABLED = _HAVE_NUMBA and _flag in ("", "0", "false", "no")


def kernel(fn):
    """Compile ``fn`` with numba when enabled, otherwise return it unchanged."""
    if NUMBA_ENABLED:
        return numba.njit(cache=True)(fn)
    return fn


def python_impl(fn):
    """Return the uncompiled implementation of a kernel (for benchmarks)."""
    return getattr(fn, "py_func", fn)
