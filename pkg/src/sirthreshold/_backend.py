"""Kernel selection.

The compiled extension is used when it imports; otherwise the pure-Python
kernels are used. Setting ``SIRTHRESHOLD_PURE=1`` forces the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
kernels = _pykernels

if os.environ.get("SIRTHRESHOLD_PURE", "") in ("", "0"):
    try:
        from . import _kernels as kernels  # noqa: F811
    except ImportError:
        pass
    else:
        BACKEND = "compiled"

rk4_sir = kernels.rk4_sir
simpson_excess = kernels.simpson_excess
