"""Select the compiled kernels when available, else the pure-Python ones.

Set ``FLOWKNOT_PURE=1`` to force the fallback.
"""
import os

BACKEND = "python"

if os.environ.get("FLOWKNOT_PURE", "") not in ("", "0"):
    from ._fallback import empty_rectangles, gf2_rank, perm_rank
else:
    try:
        from ._kernels import empty_rectangles, gf2_rank, perm_rank

        BACKEND = "cython"
    except ImportError:  # extension not built
        from ._fallback import empty_rectangles, gf2_rank, perm_rank

__all__ = ["BACKEND", "empty_rectangles", "gf2_rank", "perm_rank"]
