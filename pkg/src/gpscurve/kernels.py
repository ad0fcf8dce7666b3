"""Float64 hot loops, compiled when the extension is built.

Set ``GPSCURVE_PURE_PYTHON=1`` to force the pure-Python implementations.
"""
import os

if os.environ.get("GPSCURVE_PURE_PYTHON", "") not in ("", "0"):
    from ._kernels_py import BACKEND, backlog_steps, subset_max, waterfill
else:
    try:
        from ._kernels import BACKEND, backlog_steps, subset_max, waterfill
    except ImportError:  # extension not built
        from ._kernels_py import BACKEND, backlog_steps, subset_max, waterfill

__all__ = ["BACKEND", "backlog_steps", "subset_max", "waterfill"]
