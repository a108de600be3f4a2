"""Hot numerical kernels with a compiled core and a pure-Python fallback.

The compiled extension is preferred; set ``TWINBEAM_KERNEL_BACKEND=python``
to force the numpy fallback (used by the benchmark and backend-parity tests).
"""

import os

_requested = os.environ.get("TWINBEAM_KERNEL_BACKEND", "auto")

if _requested == "python":
    from . import _numpy as _impl

    BACKEND = "python"
else:
    try:
        from . import _core as _impl

        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        from . import _numpy as _impl

        BACKEND = "python"

block_sum = _impl.block_sum
deposit = _impl.deposit
deposit_weighted = _impl.deposit_weighted
pearson_shift_map = _impl.pearson_shift_map

__all__ = [
    "BACKEND",
    "block_sum",
    "deposit",
    "deposit_weighted",
    "pearson_shift_map",
]
