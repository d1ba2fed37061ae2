"""Kernel selection: the compiled extension when importable, else the Python twins.

Set ``ERGOCOUNT_PURE=1`` to force the pure-Python kernels.
"""

import os

from . import _pycore

pure = _pycore

if os.environ.get("ERGOCOUNT_PURE", "") not in ("", "0"):
    kernels = _pycore
    COMPILED = False
else:
    try:
        from . import _core as kernels  # type: ignore[attr-defined]

        COMPILED = True
    except ImportError:
        kernels = _pycore
        COMPILED = False

NAME = "cython" if COMPILED else "python"
