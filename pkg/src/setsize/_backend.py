"""Kernel backend selection.

Hot numeric kernels in :mod:`setsize._kernels` are written in plain
numpy/Python and compiled with numba's ``@njit`` by default.  Setting the
environment variable ``SETSIZE_NO_NUMBA=1`` before import selects the
uncompiled fallback path: the very same source runs through the interpreter,
so results are bit-identical, just slower.  ``benchmarks/bench_backends.py``
compares the two paths.
"""

import functools
import os

import numpy as np

_FLAG = os.environ.get("SETSIZE_NO_NUMBA", "").strip().lower()
NUMBA_DISABLED = _FLAG in ("1", "true", "yes", "on")

JIT_ENABLED = False

if not NUMBA_DISABLED:
    try:
        from numba import njit as _numba_njit

        JIT_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a hard dep, but be safe
        pass


def _passthrough_njit(*args, **kwargs):
    """Substitute for numba.njit: run the plain-Python path.

    Wraps calls in ``np.errstate(over="ignore")`` so that the deliberate
    uint64 wraparound in the RNG core does not warn outside numba.
    """

    def decorate(func):
        @functools.wraps(func)
        def wrapper(*a, **k):
            with np.errstate(over="ignore"):
                return func(*a, **k)

        wrapper.__wrapped__ = func
        return wrapper

    if len(args) == 1 and callable(args[0]) and not kwargs:
        return decorate(args[0])
    return decorate


if JIT_ENABLED:
    njit = _numba_njit
else:
    njit = _passthrough_njit


def backend_name() -> str:
    return "numba" if JIT_ENABLED else "python"
