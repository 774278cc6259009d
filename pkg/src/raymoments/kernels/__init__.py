"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; the NumPy
implementation is the fallback and the reference.  Set the environment
variable ``RAYMOMENTS_KERNEL=numpy`` before import to force the fallback
(used by the benchmark and the backend-agreement tests).
"""

from __future__ import annotations

import os

from . import numpy_backend

BACKEND = "numpy"
line_transform_terms = numpy_backend.line_transform_terms

if os.environ.get("RAYMOMENTS_KERNEL", "").lower() not in ("numpy", "python"):
    try:
        from raymoments import _linekernel

        line_transform_terms = _linekernel.line_transform_terms
        BACKEND = "compiled"
    except ImportError:
        pass
