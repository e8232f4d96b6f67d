"""Backend selection for the inner loops.

The compiled extension is used when it imports; otherwise the pure Python
module is.  ``HEDGEKIT_PURE_PYTHON=1`` forces the fallback.  Both backends
produce bit-identical results, so the choice never changes an artifact.
"""
import os

from . import _pykernels

pure = _pykernels

if os.environ.get("HEDGEKIT_PURE_PYTHON"):
    compiled = None
else:
    try:
        from . import _ckernels as compiled
    except ImportError:
        compiled = None

_impl = compiled if compiled is not None else pure
BACKEND = "cython" if compiled is not None else "python"

STATIC = _pykernels.STATIC
PROPORTIONAL = _pykernels.PROPORTIONAL
THRESHOLD_DEVIATION = _pykernels.THRESHOLD_DEVIATION
INCREMENTAL = _pykernels.INCREMENTAL

normals = _impl.normals
synth_path = _impl.synth_path
rolling_mean = _impl.rolling_mean
hedge_path = _impl.hedge_path
pnl_path = _impl.pnl_path
max_drawdown = _impl.max_drawdown

__all__ = [
    "BACKEND", "compiled", "pure",
    "normals", "synth_path", "rolling_mean", "hedge_path", "pnl_path", "max_drawdown",
]
