# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-edge kernels; same interface as _kernels_py."""

import numpy as np
cimport numpy as cnp
from libc.math cimport atan2, sqrt, M_PI

cnp.import_array()

BACKEND = "cython"


cdef inline double _beta(double* q0, double* q1, double* q2, double* q3) noexcept nogil:
    cdef double a[3]
    cdef double b[3]
    cdef double c[3]
    cdef double u[3]
    cdef double v[3]
    cdef double na = 0.0, nb = 0.0, nc = 0.0
    cdef int m
    for m in range(3):
        a[m] = q1[m] - q0[m]
        b[m] = q2[m] - q0[m]
        c[m] = q3[m] - q0[m]
        na += a[m] * a[m]
        nb += b[m] * b[m]
        nc += c[m] * c[m]
    for m in range(3):
        u[m] = a[m] / na - b[m] / nb
        v[m] = c[m] / nc - a[m] / na
    cdef double x = u[1] * v[2] - u[2] * v[1]
    cdef double y = u[2] * v[0] - u[0] * v[2]
    cdef double z = u[0] * v[1] - u[1] * v[0]
    return atan2(sqrt(x * x + y * y + z * z), u[0] * v[0] + u[1] * v[1] + u[2] * v[2])


def quad_betas(Q):
    cdef double[:, :, ::1] q = np.ascontiguousarray(Q, dtype=np.float64)
    cdef Py_ssize_t n = q.shape[0], e
    out = np.empty(n)
    cdef double[::1] o = out
    with nogil:
        for e in range(n):
            o[e] = _beta(&q[e, 0, 0], &q[e, 1, 0], &q[e, 2, 0], &q[e, 3, 0])
    return out


def edge_betas(P, quads):
    cdef double[:, ::1] p = np.ascontiguousarray(P, dtype=np.float64)
    cdef long[:, ::1] qd = np.ascontiguousarray(quads, dtype=np.int64)
    cdef Py_ssize_t n = qd.shape[0], e
    out = np.empty(n)
    cdef double[::1] o = out
    with nogil:
        for e in range(n):
            o[e] = _beta(&p[qd[e, 0], 0], &p[qd[e, 1], 0], &p[qd[e, 2], 0], &p[qd[e, 3], 0])
    return out


def willmore_energy(P, quads, weights, long n_interior):
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef double[::1] b = edge_betas(P, quads)
    cdef double s = 0.0
    cdef Py_ssize_t e
    for e in range(b.shape[0]):
        s += w[e] * b[e]
    return s - M_PI * n_interior


def fd_gradient(P, quads, weights, pair_vertex, pair_edge, pair_slot, double step):
    cdef double[:, ::1] p = np.ascontiguousarray(P, dtype=np.float64)
    cdef long[:, ::1] qd = np.ascontiguousarray(quads, dtype=np.int64)
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef long[::1] pv = np.ascontiguousarray(pair_vertex, dtype=np.int64)
    cdef long[::1] pe = np.ascontiguousarray(pair_edge, dtype=np.int64)
    cdef long[::1] ps = np.ascontiguousarray(pair_slot, dtype=np.int64)
    grad = np.zeros((p.shape[0], 3))
    cdef double[:, ::1] g = grad
    cdef double buf[4][3]
    cdef Py_ssize_t n = pe.shape[0], k
    cdef int s, c, m
    cdef long e
    cdef double bp, bm
    with nogil:
        for k in range(n):
            e = pe[k]
            for s in range(4):
                for m in range(3):
                    buf[s][m] = p[qd[e, s], m]
            for c in range(3):
                buf[ps[k]][c] += step
                bp = _beta(buf[0], buf[1], buf[2], buf[3])
                buf[ps[k]][c] -= 2.0 * step
                bm = _beta(buf[0], buf[1], buf[2], buf[3])
                buf[ps[k]][c] += step
                g[pv[k], c] += w[e] * (bp - bm) / (2.0 * step)
    return grad
