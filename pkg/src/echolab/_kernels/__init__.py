"""Evaluation-kernel backend selection.

The compiled Cython kernel is used when available; the NumPy fallback is
always present.  Set ``ECHOLAB_KERNEL=python`` (or ``c``) to force a backend.
Both backends are bit-compatible up to floating-point reassociation and are
cross-checked in the test suite; ``benchmarks/bench_kernels.py`` compares
their throughput.
"""

from __future__ import annotations

import os

from . import reference

_requested = os.environ.get("ECHOLAB_KERNEL", "auto").lower()

try:
    from . import _fastwave as _compiled
except ImportError:  # extension not built
    _compiled = None

if _requested == "python":
    BACKEND = "python"
elif _requested == "c":
    if _compiled is None:
        raise ImportError("ECHOLAB_KERNEL=c but the compiled kernel is not available")
    BACKEND = "c"
else:
    BACKEND = "c" if _compiled is not None else "python"

if BACKEND == "c":
    states_on_points = _compiled.states_on_points
else:
    states_on_points = reference.states_on_points

__all__ = ["states_on_points", "BACKEND", "reference"]
