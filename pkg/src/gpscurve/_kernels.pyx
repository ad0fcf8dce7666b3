# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled float64 kernels: water-filling, subset enumeration, fixed-step backlog."""
import numpy as np

from libc.math cimport INFINITY, isinf
from libc.stdlib cimport free, malloc

BACKEND = "cython"


cdef double _waterfill(const double[::1] phi, const double[::1] x, double resource,
                       int* order, double* ratio) nogil:
    cdef Py_ssize_t n = phi.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double r, remaining = resource, wsum
    for i in range(n):
        ratio[i] = x[i] / phi[i]
        order[i] = <int>i
    # insertion sort by ratio; n is small
    for i in range(1, n):
        k = order[i]
        r = ratio[k]
        j = i - 1
        while j >= 0 and ratio[order[j]] > r:
            order[j + 1] = order[j]
            j -= 1
        order[j + 1] = <int>k
    # suffix weight sums from the back, so the last player sees exactly phi[k]
    for i in range(n - 1, -1, -1):
        wsum = phi[order[i]] + (ratio[i + 1] if i + 1 < n else 0.0)
        ratio[i] = wsum
    for i in range(n):
        k = order[i]
        wsum = ratio[i]
        if isinf(x[k]) or x[k] * wsum > remaining * phi[k]:
            return remaining / wsum
        remaining -= x[k]
    return INFINITY


def waterfill(phi, x, double resource):
    """Fair share of requests ``x`` with weights ``phi``; ``inf`` if all fit."""
    cdef const double[::1] p = np.ascontiguousarray(phi, dtype=np.float64)
    cdef const double[::1] q = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0]
    cdef int* order = <int*>malloc(max(n, 1) * sizeof(int))
    cdef double* ratio = <double*>malloc(max(n, 1) * sizeof(double))
    cdef double f
    try:
        f = _waterfill(p, q, resource, order, ratio)
    finally:
        free(order)
        free(ratio)
    return f


def subset_max(phi, x, double resource):
    """Fair share by enumerating every subset of satisfied players."""
    cdef const double[::1] p = np.ascontiguousarray(phi, dtype=np.float64)
    cdef const double[::1] q = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0]
    if n > 24:
        raise ValueError("too many players to enumerate")
    cdef Py_ssize_t size = (<Py_ssize_t>1) << n
    cdef Py_ssize_t full = size - 1
    cdef double* xs = <double*>malloc(size * sizeof(double))
    cdef double* ws = <double*>malloc(size * sizeof(double))
    cdef Py_ssize_t mask, low, bit
    cdef double best = -INFINITY, val, num, den
    try:
        xs[0] = 0.0
        ws[0] = 0.0
        for mask in range(1, size):
            low = mask & (-mask)
            bit = 0
            while ((<Py_ssize_t>1) << bit) != low:
                bit += 1
            xs[mask] = xs[mask ^ low] + q[bit]
            ws[mask] = ws[mask ^ low] + p[bit]
        for mask in range(size):
            if isinf(xs[mask]):
                continue
            num = resource - xs[mask]
            if mask == full:
                val = INFINITY if num >= 0 else -INFINITY
            else:
                den = ws[full ^ mask]
                val = num / den
            if val > best:
                best = val
    finally:
        free(xs)
        free(ws)
    return best


def backlog_steps(backlog, arrival_rates, double service_rate, phi, steps):
    """Backlog after each fixed step on a constant-rate stretch.

    Each step of length ``h`` serves ``service_rate * h`` max-min fairly against
    requests ``backlog + rate * h``.  Returns an array ``(len(steps), n)``.
    """
    cdef double[::1] b = np.array(backlog, dtype=np.float64)
    cdef const double[::1] a = np.ascontiguousarray(arrival_rates, dtype=np.float64)
    cdef const double[::1] p = np.ascontiguousarray(phi, dtype=np.float64)
    cdef const double[::1] hs = np.ascontiguousarray(steps, dtype=np.float64)
    cdef Py_ssize_t n = b.shape[0], m = hs.shape[0]
    out_arr = np.empty((m, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double[::1] x = np.empty(n, dtype=np.float64)
    cdef int* order = <int*>malloc(max(n, 1) * sizeof(int))
    cdef double* ratio = <double*>malloc(max(n, 1) * sizeof(double))
    cdef Py_ssize_t k, j
    cdef double h, f, v
    try:
        for k in range(m):
            h = hs[k]
            for j in range(n):
                x[j] = b[j] + a[j] * h
            f = _waterfill(p, x, service_rate * h, order, ratio)
            for j in range(n):
                if isinf(f):
                    v = 0.0
                else:
                    v = x[j] - p[j] * f
                    if v < 0.0:
                        v = 0.0
                b[j] = v
                out[k, j] = v
    finally:
        free(order)
        free(ratio)
    return out_arr
