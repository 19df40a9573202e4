"""Select the path-consistency backend at import time.

The compiled extension is used when it was built; set ``STAL_PURE_PYTHON=1``
to force the fallback (the benchmark and the parity tests do this).
"""
import os

from . import _pc_py

BACKEND = "python"
compose = _pc_py.compose
refine = _pc_py.refine

if not os.environ.get("STAL_PURE_PYTHON"):
    try:
        from . import _pc_kernel
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        compose = _pc_kernel.compose
        refine = _pc_kernel.refine


def backends():
    """Map backend name to its ``refine`` function for every importable backend."""
    found = {"python": _pc_py.refine}
    try:
        from . import _pc_kernel
    except ImportError:
        return found
    found["cython"] = _pc_kernel.refine
    return found
