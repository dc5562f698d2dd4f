"""Select the compiled kernels when importable, else the numpy fallback.

Set ``SHARPCONST_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

if os.environ.get("SHARPCONST_PURE_PYTHON", "") not in ("", "0"):
    from . import _speedups_py as _impl

    COMPILED = False
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]

        COMPILED = True
    except ImportError:
        from . import _speedups_py as _impl

        COMPILED = False

horner = _impl.horner
horner_scalar = _impl.horner_scalar
bisect_root = _impl.bisect_root
power_moments = _impl.power_moments

__all__ = ["COMPILED", "horner", "horner_scalar", "bisect_root", "power_moments"]
