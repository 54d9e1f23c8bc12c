# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Direct oscillatory sums, compiled.

out[p] = sum_j coeffs[j] * exp(i * sign * <targets[p], nodes[j]>)

Serial on purpose: summation order is part of the determinism contract.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()


def osc_sum_direct(double[:, ::1] targets, double[:, ::1] nodes,
                   double complex[::1] coeffs, double sign,
                   double complex[::1] out):
    cdef Py_ssize_t n_t = targets.shape[0]
    cdef Py_ssize_t n_j = nodes.shape[0]
    cdef Py_ssize_t dim = targets.shape[1]
    cdef Py_ssize_t p, j, d
    cdef double ph, cr, ci, er, ei
    cdef double acc_r, acc_i
    if nodes.shape[1] != dim or out.shape[0] != n_t or coeffs.shape[0] != n_j:
        raise ValueError("shape mismatch in osc_sum_direct")
    for p in range(n_t):
        acc_r = 0.0
        acc_i = 0.0
        for j in range(n_j):
            ph = 0.0
            for d in range(dim):
                ph += targets[p, d] * nodes[j, d]
            ph *= sign
            er = cos(ph)
            ei = sin(ph)
            cr = coeffs[j].real
            ci = coeffs[j].imag
            acc_r += cr * er - ci * ei
            acc_i += cr * ei + ci * er
        out[p] = acc_r + 1j * acc_i
    return np.asarray(out)
