"""Backend selection for the hot kernels.

The compiled extension is used when it imports cleanly; setting
``TWISTXXZ_PURE_PYTHON=1`` forces the pure-Python fallback.
"""

import os

from . import _kernels_py

if os.environ.get("TWISTXXZ_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

lu_det = _impl.lu_det
bae_residual = _impl.bae_residual
bae_residual_jacobian = _impl.bae_residual_jacobian
newton_bae = _impl.newton_bae

SCALE_AD = _kernels_py.SCALE_AD
SCALE_SEP = _kernels_py.SCALE_SEP
CONVERGED = _kernels_py.CONVERGED
STALLED = _kernels_py.STALLED
MAX_ITERS = _kernels_py.MAX_ITERS
SINGULAR_JACOBIAN = _kernels_py.SINGULAR_JACOBIAN
NONFINITE = _kernels_py.NONFINITE
STATUS_NAMES = {
    CONVERGED: "converged",
    STALLED: "stalled",
    MAX_ITERS: "max_iters",
    SINGULAR_JACOBIAN: "singular_jacobian",
    NONFINITE: "nonfinite",
}
