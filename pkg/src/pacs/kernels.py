"""Kernel dispatch: compiled extension when importable, numpy fallback otherwise.

Set ``PACS_PURE_PYTHON=1`` before import to force the fallback.
"""
import os

from . import _kernels_py

if os.environ.get("PACS_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "compiled" if _impl is not _kernels_py else "python"

beam_splitter_apply = _impl.beam_splitter_apply
displaced_parity = _impl.displaced_parity
