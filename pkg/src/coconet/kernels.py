"""Backend selection for the hot loops.

The compiled Cython module is used when it was built; otherwise the numpy
fallback. Set ``COCONET_PURE=1`` to force the fallback.
"""

import os

from . import _fallback

try:
    if os.environ.get("COCONET_PURE") == "1":
        raise ImportError("pure backend forced")
    from . import _kernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _fallback
    BACKEND = "python"

enumerate_candidates = _impl.enumerate_candidates
fictitious = _impl.fictitious
solve_status = _impl.solve_status

__all__ = ["BACKEND", "enumerate_candidates", "fictitious", "solve_status"]
