# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled im2col / col2im, the hot kernels under every conv layer.

Same contract as ``_convops_py``; selected automatically by
``labeldiff.kernels`` when the extension is built.
"""

import numpy as np

cimport cython
cimport numpy as cnp

BACKEND = "cython"

ctypedef fused floating:
    float
    double


def im2col(floating[:, :, :, ::1] x, int k, int stride):
    cdef Py_ssize_t n = x.shape[0], c = x.shape[1], hp = x.shape[2], wp = x.shape[3]
    cdef Py_ssize_t oh = (hp - k) // stride + 1
    cdef Py_ssize_t ow = (wp - k) // stride + 1
    cdef Py_ssize_t l = oh * ow

    if floating is float:
        dtype = np.float32
    else:
        dtype = np.float64
    out_arr = np.empty((c * k * k, n, l), dtype=dtype)
    cdef floating[:, :, ::1] out = out_arr

    cdef Py_ssize_t ci, ki, kj, ni, i, j, row
    with nogil:
        for ci in range(c):
            for ki in range(k):
                for kj in range(k):
                    row = (ci * k + ki) * k + kj
                    for ni in range(n):
                        for i in range(oh):
                            for j in range(ow):
                                out[row, ni, i * ow + j] = x[ni, ci, i * stride + ki, j * stride + kj]
    return out_arr


def col2im(floating[:, :, ::1] cols, Py_ssize_t n, Py_ssize_t c,
           Py_ssize_t hp, Py_ssize_t wp, int k, int stride):
    cdef Py_ssize_t oh = (hp - k) // stride + 1
    cdef Py_ssize_t ow = (wp - k) // stride + 1

    if floating is float:
        dtype = np.float32
    else:
        dtype = np.float64
    x_arr = np.zeros((n, c, hp, wp), dtype=dtype)
    cdef floating[:, :, :, ::1] x = x_arr

    cdef Py_ssize_t ci, ki, kj, ni, i, j, row
    with nogil:
        for ci in range(c):
            for ki in range(k):
                for kj in range(k):
                    row = (ci * k + ki) * k + kj
                    for ni in range(n):
                        for i in range(oh):
                            for j in range(ow):
                                x[ni, ci, i * stride + ki, j * stride + kj] += cols[row, ni, i * ow + j]
    return x_arr
