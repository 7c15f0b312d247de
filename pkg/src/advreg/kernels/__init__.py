"""Kernel backend selection.

The numba backend (compiled from loops.py) is the default; set
ADVREG_NO_NUMBA=1 to force the vectorized numpy backend, which is also
used automatically when numba is not importable. `BACKEND` names the
active choice.
"""

import os

from . import vector

_flag = os.environ.get("ADVREG_NO_NUMBA", "").strip().lower()

if _flag in ("", "0", "false", "no"):
    try:
        from . import jit as _impl
        BACKEND = "numba"
    except ImportError:
        _impl = vector
        BACKEND = "numpy"
else:
    _impl = vector
    BACKEND = "numpy"

forward_batch = _impl.forward_batch
input_grads = _impl.input_grads
param_grads = _impl.param_grads
knn_predict = _impl.knn_predict
loss_values = _impl.loss_values
loss_grads = _impl.loss_grads

__all__ = [
    "BACKEND",
    "forward_batch",
    "input_grads",
    "param_grads",
    "knn_predict",
    "loss_values",
    "loss_grads",
]
