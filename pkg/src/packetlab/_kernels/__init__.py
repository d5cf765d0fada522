"""Hot numerical kernels with a compiled core and a NumPy fallback.

The Cython extension is preferred when it was built; otherwise the NumPy
implementations take over transparently. Set PACKETLAB_NO_EXTENSION=1 in
the environment to force the fallback (used by tests and benchmarks).
BACKEND names the implementation actually in use.
"""
from __future__ import annotations

import os

from . import _numpy as _numpy_backend

if os.environ.get("PACKETLAB_NO_EXTENSION"):
    _impl = _numpy_backend
    BACKEND = "numpy"
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _numpy_backend
        BACKEND = "numpy"

apply_time_phase = _impl.apply_time_phase
abs_squared = _impl.abs_squared
density_moments = _impl.density_moments

__all__ = ["BACKEND", "abs_squared", "apply_time_phase", "density_moments"]
