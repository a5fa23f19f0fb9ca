# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Mirrors ``_pykernels`` function for function."""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, log, sqrt, M_PI

cnp.import_array()

ctypedef unsigned long long u64

cdef u64 GOLDEN = 0x9E3779B97F4A7C15ULL
cdef u64 MASK64 = 0xFFFFFFFFFFFFFFFFULL


cdef inline u64 _mix(u64 z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


def splitmix64_uniform(state, Py_ssize_t n):
    cdef u64 s = <u64>(state & MASK64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            s = s + GOLDEN
            o[i] = <double>(_mix(s) >> 11) * 1.1102230246251565e-16
    return out, int(s)


def box_muller_normal(state, Py_ssize_t n):
    cdef u64 s = <u64>(state & MASK64)
    cdef Py_ssize_t pairs = (n + 1) // 2
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(2 * pairs, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    cdef double u1, u2, r, theta
    with nogil:
        for i in range(pairs):
            s = s + GOLDEN
            u1 = 1.0 - <double>(_mix(s) >> 11) * 1.1102230246251565e-16
            s = s + GOLDEN
            u2 = <double>(_mix(s) >> 11) * 1.1102230246251565e-16
            r = sqrt(-2.0 * log(u1))
            theta = 2.0 * M_PI * u2
            o[2 * i] = r * cos(theta)
            o[2 * i + 1] = r * sin(theta)
    return out[:n], int(s)


def cyclic_mean3(const double[:, ::1] y):
    cdef Py_ssize_t b = y.shape[0], n = y.shape[1], r, i
    out = np.empty((b, n), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for r in range(b):
            o[r, 0] = (y[r, n - 1] + y[r, 0] + y[r, 1]) / 3.0
            for i in range(1, n - 1):
                o[r, i] = (y[r, i - 1] + y[r, i] + y[r, i + 1]) / 3.0
            o[r, n - 1] = (y[r, n - 2] + y[r, n - 1] + y[r, 0]) / 3.0
    return out


def cyclic_smoothing(const double[:, ::1] y, double omega):
    cdef Py_ssize_t b = y.shape[0], n = y.shape[1], r, i, im, ip
    loss = np.empty(b, dtype=np.float64)
    grad = np.empty((b, n), dtype=np.float64)
    cdef double[::1] lo = loss
    cdef double[:, ::1] g = grad
    cdef double[::1] dev = np.empty(n, dtype=np.float64)
    cdef double acc, scale = 2.0 * omega / n
    with nogil:
        for r in range(b):
            acc = 0.0
            for i in range(n):
                im = n - 1 if i == 0 else i - 1
                ip = 0 if i == n - 1 else i + 1
                dev[i] = (2.0 * y[r, i] - y[r, im] - y[r, ip]) / 3.0
                acc = acc + dev[i] * dev[i]
            lo[r] = omega * acc / n
            for i in range(n):
                im = n - 1 if i == 0 else i - 1
                ip = 0 if i == n - 1 else i + 1
                g[r, i] = scale * ((2.0 * dev[i] - dev[im] - dev[ip]) / 3.0)
    return loss, grad


def cyclic_correlate(const double[:, ::1] y, const double[::1] weights):
    cdef Py_ssize_t b = y.shape[0], n = y.shape[1], m = weights.shape[0]
    cdef Py_ssize_t h = m // 2, r, i, k, j
    cdef double acc
    out = np.empty((b, n), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for r in range(b):
            for i in range(n):
                acc = 0.0
                for k in range(m):
                    j = (i + k - h) % n
                    if j < 0:
                        j = j + n
                    acc = acc + weights[k] * y[r, j]
                o[r, i] = acc
    return out


def adam_update(double[::1] p, const double[::1] g, double[::1] m, double[::1] v,
                double lr, double beta1, double beta2, double c1, double c2, double eps):
    """Fused in-place Adam step over flat arrays; returns the count of non-finite updates."""
    cdef Py_ssize_t i, n = p.shape[0]
    cdef Py_ssize_t bad = 0
    cdef double u
    with nogil:
        for i in range(n):
            m[i] = m[i] * beta1 + (1.0 - beta1) * g[i]
            v[i] = v[i] * beta2 + (1.0 - beta2) * (g[i] * g[i])
            u = lr * (m[i] / c1) / (sqrt(v[i] / c2) + eps)
            if u - u != 0.0:
                bad += 1
            else:
                p[i] = p[i] - u
    return bad
