"""Pick the kernel implementation at import time.

The compiled extension is used when it imports; ``TWEDGE_BACKEND=python``
forces the pure-Python kernels.
"""
import os

from . import _pykernels as python_kernels

try:
    from . import _ckernels as compiled_kernels
except ImportError:  # extension not built
    compiled_kernels = None

if os.environ.get("TWEDGE_BACKEND", "").lower() == "python" or compiled_kernels is None:
    kernels = python_kernels
    NAME = "python"
else:
    kernels = compiled_kernels
    NAME = "compiled"


def get(name=None):
    """Return the kernel module called ``name`` ("compiled" or "python")."""
    if name is None:
        return kernels
    if name == "python":
        return python_kernels
    if name == "compiled":
        if compiled_kernels is None:
            raise ImportError("twedge._ckernels is not built")
        return compiled_kernels
    raise ValueError(f"unknown backend {name!r}")
