"""Backend switch for the numeric kernels.

``DEFML_NUMBA=0`` (or ``false``/``off``/``no``) forces the numpy path; the
same happens when numba cannot be imported.
"""
from __future__ import annotations

import os

_FLAG = os.environ.get("DEFML_NUMBA", "1").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and _FLAG not in ("0", "false", "off", "no")


def njit(fn):
    """``numba.njit(cache=True)`` when numba is importable, else identity."""
    if numba is None:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)
