"""Hot elimination kernel with a numba path and a numpy fallback.

The backend is chosen once at import from ``TATEFORGE_NUMBA``:
``"1"`` (default) uses numba when it imports, ``"0"`` forces numpy.
"""

import os

from . import numpy_kernels

_want_numba = os.environ.get("TATEFORGE_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")

if _want_numba:
    try:
        from . import numba_kernels as _impl

        BACKEND = "numba"
    except ImportError:  # numba missing
        _impl = numpy_kernels
        BACKEND = "numpy"
else:
    _impl = numpy_kernels
    BACKEND = "numpy"

rref_mod_p = _impl.rref_mod_p

__all__ = ["BACKEND", "rref_mod_p", "numpy_kernels"]
