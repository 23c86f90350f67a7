"""Hot loops, compiled when the extension is built and numpy otherwise.

Set ``ADAPTSCAFFOLD_PURE=1`` to force the numpy path.
"""

import os

from . import fallback

try:
    if os.environ.get("ADAPTSCAFFOLD_PURE"):
        raise ImportError("pure mode requested")
    from . import _kernels as _impl

    BACKEND = "compiled"
except ImportError:
    _impl = fallback
    BACKEND = "python"

first_countermodel = _impl.first_countermodel
bkt_trace = _impl.bkt_trace
dominance_counts = _impl.dominance_counts

__all__ = ["BACKEND", "first_countermodel", "bkt_trace", "dominance_counts", "fallback"]
