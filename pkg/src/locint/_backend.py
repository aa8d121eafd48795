"""Selects the compiled arithmetic kernels when available.

Set LOCINT_PURE=1 to force the pure-Python reference kernels even when
the extension built. Both backends produce identical integers.
"""

import os

if os.environ.get("LOCINT_PURE"):
    from . import _kernels as _impl
    BACKEND = "pure"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "compiled"
    except ImportError:
        from . import _kernels as _impl
        BACKEND = "pure"

superset_sums = _impl.superset_sums
partition_ratios = _impl.partition_ratios
