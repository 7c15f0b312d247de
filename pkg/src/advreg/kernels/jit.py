"""numba-compiled versions of the loop kernels."""

from numba import njit

from . import loops as _loops

_compile = njit(cache=True)

layer_offsets = _compile(_loops.layer_offsets)
forward_batch = _compile(_loops.forward_batch)
input_grads = _compile(_loops.input_grads)
param_grads = _compile(_loops.param_grads)
knn_predict = _compile(_loops.knn_predict)
loss_values = _compile(_loops.loss_values)
loss_grads = _compile(_loops.loss_grads)
