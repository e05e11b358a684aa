# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled counting kernels: cross-cluster counts over labeling batches
and clique-expansion weights.  Semantics match _kernels_py exactly."""

import numpy as np


def cross_counts(const long long[:, ::1] edge_verts, const signed char[:, ::1] labels):
    cdef Py_ssize_t m = edge_verts.shape[0]
    cdef Py_ssize_t h = edge_verts.shape[1]
    cdef Py_ssize_t L = labels.shape[0]
    cdef Py_ssize_t i, j, k
    cdef signed char first
    cdef long long cnt, mono
    out = np.zeros(L, dtype=np.int64)
    cdef long long[::1] out_v = out
    with nogil:
        for i in range(L):
            cnt = 0
            for j in range(m):
                first = labels[i, edge_verts[j, 0]]
                mono = 1
                for k in range(1, h):
                    mono &= labels[i, edge_verts[j, k]] == first
                cnt += 1 - mono
            out_v[i] = cnt
    return out


def expansion_weights(const long long[:, ::1] edge_verts, Py_ssize_t n):
    cdef Py_ssize_t m = edge_verts.shape[0]
    cdef Py_ssize_t h = edge_verts.shape[1]
    cdef Py_ssize_t e, i, j
    cdef long long u, v
    W = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] W_v = W
    with nogil:
        for e in range(m):
            for i in range(h):
                u = edge_verts[e, i]
                for j in range(i + 1, h):
                    v = edge_verts[e, j]
                    W_v[u, v] += 1.0
                    W_v[v, u] += 1.0
    return W
