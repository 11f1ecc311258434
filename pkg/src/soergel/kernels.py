"""Kernel selection: compiled extension when importable, Python otherwise.

Set ``SOERGEL_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from soergel import _kernels_py

BACKEND = "python"
mul_terms = _kernels_py.mul_terms

if os.environ.get("SOERGEL_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from soergel import _ckernels  # type: ignore[attr-defined]
    except ImportError:
        pass
    else:
        mul_terms = _ckernels.mul_terms
        BACKEND = "compiled"
