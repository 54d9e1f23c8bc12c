"""Oscillatory-sum kernels with a compiled core and a numpy fallback.

Backend selection happens at import: the compiled extension is used when it
built, unless FIOLAB_BACKEND=python forces the fallback.  Each backend is
deterministic (fixed chunking, no thread-order dependence), so repeated runs
on the same backend give byte-identical outputs; across backends results
agree to rounding.
"""

import os

import numpy as np

_CHUNK = 32768  # fixed accumulation chunk; part of the determinism contract

try:
    from . import _core as _compiled
except ImportError:
    _compiled = None

_forced = os.environ.get("FIOLAB_BACKEND", "").lower()
if _forced == "python":
    _compiled = None
elif _forced == "compiled" and _compiled is None:
    raise ImportError("FIOLAB_BACKEND=compiled but the extension is missing")

BACKEND = "compiled" if _compiled is not None else "python"


def _osc_sum_python(targets, nodes, coeffs, sign, out):
    n_t = len(targets)
    for start in range(0, n_t, _CHUNK):
        stop = min(start + _CHUNK, n_t)
        ph = sign * (targets[start:stop] @ nodes.T)
        out[start:stop] = np.exp(1j * ph) @ coeffs
    return out


def osc_sum_direct(targets, nodes, coeffs, sign=1.0, out=None):
    """out[p] = sum_j coeffs[j] exp(i * sign * <targets[p], nodes[j]>)."""
    targets = np.ascontiguousarray(targets, dtype=np.float64)
    nodes = np.ascontiguousarray(nodes, dtype=np.float64)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    if out is None:
        out = np.empty(len(targets), dtype=np.complex128)
    if _compiled is not None:
        return _compiled.osc_sum_direct(targets, nodes, coeffs, float(sign), out)
    return _osc_sum_python(targets, nodes, coeffs, float(sign), out)


def _exp_matrix(axis, nodes_1d, sign):
    """E[a, j] = exp(i * sign * axis[a] * nodes_1d[j]) by row recurrence.

    The axis must be uniform; only the first row and the step factors hit
    the exponential, the rest is complex multiplication.
    """
    axis = np.asarray(axis, dtype=np.float64)
    nodes_1d = np.asarray(nodes_1d, dtype=np.float64)
    n_a = len(axis)
    out = np.empty((n_a, len(nodes_1d)), dtype=np.complex128)
    out[0] = np.exp(1j * sign * axis[0] * nodes_1d)
    if n_a > 1:
        step = axis[1] - axis[0]
        base = np.exp(1j * sign * step * nodes_1d)
        for a in range(1, n_a):
            np.multiply(out[a - 1], base, out=out[a])
    return out


def osc_sum_grid(axes, nodes, coeffs, sign=1.0):
    """Oscillatory sum onto the tensor grid given by uniform ``axes``.

    Returns an array of shape (len(axes[0]), ..., len(axes[-1])).  The node
    loop is chunked at a fixed size so floating-point accumulation order is
    independent of problem size.
    """
    nodes = np.ascontiguousarray(nodes, dtype=np.float64)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    dim = nodes.shape[1]
    if len(axes) != dim:
        raise ValueError("axes count does not match node dimension")
    if dim == 1:
        e0 = _exp_matrix(axes[0], nodes[:, 0], sign)
        return e0 @ coeffs
    if dim != 2:
        raise ValueError("grid sums are implemented for dimensions 1 and 2")
    n_a, n_b = len(axes[0]), len(axes[1])
    out = np.zeros((n_a, n_b), dtype=np.complex128)
    for start in range(0, len(nodes), _CHUNK):
        stop = min(start + _CHUNK, len(nodes))
        e0 = _exp_matrix(axes[0], nodes[start:stop, 0], sign)
        e1 = _exp_matrix(axes[1], nodes[start:stop, 1], sign)
        out += (e0 * coeffs[start:stop][None, :]) @ e1.T
    return out
