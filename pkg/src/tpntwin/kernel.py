"""Selects the DBM closure kernel at import time.

The compiled ``_dbmcore`` extension is used when it imports; otherwise, or
when ``TPNTWIN_PURE_PYTHON=1`` is set, the pure-Python kernel runs. The
compiled path hands back to Python whenever int64 could overflow, so both
backends always produce identical exact results.
"""

import os

from ._kernel_py import close_flat as close_flat_py

try:
    if os.environ.get("TPNTWIN_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure Python kernel forced")
    from ._dbmcore import close_flat as close_flat_native
    BACKEND = "cython"
except ImportError:
    close_flat_native = None
    BACKEND = "python"


def close_flat(cells, n):
    if close_flat_native is not None:
        out = close_flat_native(cells, n)
        if out is not None:
            return out
    return close_flat_py(cells, n)
