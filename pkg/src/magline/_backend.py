"""Pick the compiled kernels when available.

Set ``MAGLINE_PURE=1`` to force the pure-Python kernels (used by the
benchmark and the parity tests).
"""

import os

from . import _pykernels

BACKEND = "python"
kernels = _pykernels

if not os.environ.get("MAGLINE_PURE"):
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        kernels = _ckernels
        BACKEND = "cython"

carlson_rf = kernels.carlson_rf
complete_k = kernels.complete_k
sncndn = kernels.sncndn
sncndn_array = kernels.sncndn_array
dopri_linear = kernels.dopri_linear
