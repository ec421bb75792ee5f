# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loop: batch evaluation of a log-potential field.

out[i] = robin + sum_j w[j] * ln|z_i - q_j|

One fused pass, no temporaries; the numpy fallback in ``kernels.py``
computes the same thing a chunk at a time.
"""

from libc.math cimport log


def eval_potential(const double[::1] zx, const double[::1] zy,
                   const double[::1] qx, const double[::1] qy,
                   const double[::1] w, double robin,
                   double[::1] out):
    cdef Py_ssize_t n = zx.shape[0]
    cdef Py_ssize_t m = qx.shape[0]
    cdef Py_ssize_t i, j
    cdef double acc, dx, dy, x, y
    for i in range(n):
        acc = 0.0
        x = zx[i]
        y = zy[i]
        for j in range(m):
            dx = x - qx[j]
            dy = y - qy[j]
            acc += w[j] * log(dx * dx + dy * dy)
        out[i] = robin + 0.5 * acc
    return 0
