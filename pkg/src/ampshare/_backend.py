"""Pick the compiled kernels when available, else the numpy fallback.

Set ``AMPSHARE_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("AMPSHARE_PURE_PYTHON", "") not in ("", "0"):
    from ._purepy import classify_many, grid_search

    BACKEND = "python"
else:
    try:
        from ._kernels import classify_many, grid_search

        BACKEND = "cython"
    except ImportError:
        from ._purepy import classify_many, grid_search

        BACKEND = "python"

__all__ = ["BACKEND", "classify_many", "grid_search"]
