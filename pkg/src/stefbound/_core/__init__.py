"""Grid reduction kernels.

Two interchangeable backends: the compiled ``_ckernels`` extension (built from
``_ckernels.pyx`` with compensated summation) and the numpy ``_pykernels``
fallback.  The compiled one is used when importable unless the environment
variable ``STEFBOUND_PURE_PYTHON`` is set.
"""

import os

from . import _pykernels

if os.environ.get("STEFBOUND_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

simpson = _impl.simpson
trapezoid = _impl.trapezoid
cellwise_simpson = _impl.cellwise_simpson
cumulative_simpson = _impl.cumulative_simpson
rs_sum = _impl.rs_sum
variation = _impl.variation
max_slope = _impl.max_slope

__all__ = [
    "BACKEND", "cellwise_simpson", "cumulative_simpson", "max_slope",
    "rs_sum", "simpson", "trapezoid", "variation",
]
