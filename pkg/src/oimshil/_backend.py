"""Kernel selection: compiled extension when importable, numpy otherwise.

Set ``OIMSHIL_BACKEND=python`` to force the fallback.
"""

import os

from . import _kernel_py

try:
    from . import _kernel as _compiled
except ImportError:  # extension not built
    _compiled = None


def available():
    return ("cython", "python") if _compiled is not None else ("python",)


def get_kernel(name=None):
    name = name or os.environ.get("OIMSHIL_BACKEND") or "auto"
    if name == "python":
        return _kernel_py
    if name in ("cython", "auto"):
        if _compiled is not None:
            return _compiled
        if name == "cython":
            raise ImportError("compiled kernel not built; reinstall with Cython available")
        return _kernel_py
    raise ValueError(f"unknown backend {name!r}")
