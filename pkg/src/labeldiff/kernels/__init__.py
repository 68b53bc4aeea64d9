"""Convolution kernel backend selection.

The compiled Cython backend is used when the extension was built; otherwise
the pure-numpy fallback takes over with identical semantics. Override with
``LABELDIFF_KERNELS=cython|numpy|auto`` (default: auto). ``BACKEND`` names
the backend actually in use.

Run ``python -m labeldiff.kernels.bench`` for a side-by-side benchmark.
"""

import os

from . import _convops_py

_choice = os.environ.get("LABELDIFF_KERNELS", "auto")
if _choice not in ("auto", "cython", "numpy"):
    raise RuntimeError(
        f"LABELDIFF_KERNELS must be auto, cython or numpy, got {_choice!r}")

_impl = None
if _choice in ("auto", "cython"):
    try:
        from . import _convops as _impl
    except ImportError:
        if _choice == "cython":
            raise RuntimeError(
                "LABELDIFF_KERNELS=cython but the compiled extension is not "
                "available; reinstall with a working C compiler")
        _impl = None
if _impl is None:
    _impl = _convops_py

BACKEND = _impl.BACKEND
im2col = _impl.im2col
col2im = _impl.col2im


def available_backends():
    """Names of importable backends (the numpy fallback is always present)."""
    names = ["numpy"]
    try:
        from . import _convops  # noqa: F401
        names.insert(0, "cython")
    except ImportError:
        pass
    return names
