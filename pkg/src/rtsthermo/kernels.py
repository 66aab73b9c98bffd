"""Backend selection for the hot detection loops.

The compiled Cython module is used when it was built; otherwise, or when the
environment variable ``RTSTHERMO_PURE`` is set to a non-empty value, the numpy
fallback is used.  ``BACKEND`` names the active implementation.
"""

import os

from . import _kernels_py

if os.environ.get("RTSTHERMO_PURE"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from ._ext import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

hysteresis_runs = _impl.hysteresis_runs
merge_short_runs = _impl.merge_short_runs
format_trace_rows = _impl.format_trace_rows

__all__ = ["BACKEND", "hysteresis_runs", "merge_short_runs", "format_trace_rows"]
