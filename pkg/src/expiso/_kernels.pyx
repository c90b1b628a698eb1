# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled grid sweeps.  Mirrors ``_kernels_py`` function for function."""
import numpy as np

from libc.stdint cimport uint8_t, int32_t, int64_t

ctypedef fused dist_t:
    uint8_t
    int32_t


def axis_pass(dist_t[:, :, ::1] d, bint forward, bint boundary_source, int cap):
    """One min-plus sweep along the middle axis of a (outer, axis, inner) view."""
    cdef Py_ssize_t n_out = d.shape[0], n = d.shape[1], n_in = d.shape[2]
    cdef Py_ssize_t o, i, j, src, dst
    cdef int v
    if n == 0:
        return
    with nogil:
        for o in range(n_out):
            if boundary_source:
                dst = 0 if forward else n - 1
                for j in range(n_in):
                    if d[o, dst, j] > 1:
                        d[o, dst, j] = 1
            for i in range(1, n):
                if forward:
                    src = i - 1
                    dst = i
                else:
                    src = n - i
                    dst = n - i - 1
                for j in range(n_in):
                    v = d[o, src, j] + 1
                    if v > cap:
                        v = cap
                    if v < d[o, dst, j]:
                        d[o, dst, j] = v


def mass_histogram_2d(const uint8_t[:, ::1] d, const double[::1] w0, const double[::1] w1, int nbins):
    """Sum of separable cell weights grouped by the value stored in each cell."""
    cdef Py_ssize_t i, j
    cdef double[::1] hist = np.zeros(nbins, dtype=np.float64)
    cdef double[::1] row = np.zeros(nbins, dtype=np.float64)
    cdef int v, b
    with nogil:
        for i in range(d.shape[0]):
            for b in range(nbins):
                row[b] = 0.0
            for j in range(d.shape[1]):
                v = d[i, j]
                if v < nbins:
                    row[v] += w1[j]
            for b in range(nbins):
                hist[b] += w0[i] * row[b]
    return np.asarray(hist)


def mass_histogram_3d(const uint8_t[:, :, ::1] d, const double[::1] w0, const double[::1] w1, const double[::1] w2, int nbins):
    cdef Py_ssize_t i, j, k
    cdef double[::1] hist = np.zeros(nbins, dtype=np.float64)
    cdef double[::1] row = np.zeros(nbins, dtype=np.float64)
    cdef double[::1] plane = np.zeros(nbins, dtype=np.float64)
    cdef int v, b
    with nogil:
        for i in range(d.shape[0]):
            for b in range(nbins):
                plane[b] = 0.0
            for j in range(d.shape[1]):
                for b in range(nbins):
                    row[b] = 0.0
                for k in range(d.shape[2]):
                    v = d[i, j, k]
                    if v < nbins:
                        row[v] += w2[k]
                for b in range(nbins):
                    plane[b] += w1[j] * row[b]
            for b in range(nbins):
                hist[b] += w0[i] * plane[b]
    return np.asarray(hist)


def diagonal_counts(const uint8_t[:, ::1] occ):
    """Number of nonzero cells on each anti-diagonal ``i + j = const``."""
    cdef Py_ssize_t i, j, r = occ.shape[0], c = occ.shape[1]
    cdef Py_ssize_t size = r + c - 1 if r > 0 and c > 0 else 0
    cdef int64_t[::1] out = np.zeros(size, dtype=np.int64)
    with nogil:
        for i in range(r):
            for j in range(c):
                out[i + j] += occ[i, j] != 0
    return np.asarray(out)
