# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled batch kernel: raw MAD of many same-size samples.

One call evaluates median(|x - median(x)|) for every row of a sample
matrix, with the median expressed as a fixed weighted sum of order
statistics.  This is the inner loop of every Monte-Carlo study, so it
runs without the GIL over malloc'd scratch buffers.
"""
from libc.math cimport fabs
from libc.stdlib cimport free, malloc
from libc.string cimport memcpy

import numpy as np


cdef inline void _insertion_sort(double* a, Py_ssize_t lo, Py_ssize_t hi) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double key
    for i in range(lo + 1, hi + 1):
        key = a[i]
        j = i - 1
        while j >= lo and a[j] > key:
            a[j + 1] = a[j]
            j -= 1
        a[j + 1] = key


cdef void _sort(double* a, Py_ssize_t lo, Py_ssize_t hi) noexcept nogil:
    # Quicksort with median-of-three pivot; recursion only on the smaller
    # partition, so the depth stays logarithmic.
    cdef Py_ssize_t i, j, mid
    cdef double pivot, tmp
    while hi - lo > 15:
        mid = lo + (hi - lo) // 2
        if a[mid] < a[lo]:
            tmp = a[mid]; a[mid] = a[lo]; a[lo] = tmp
        if a[hi] < a[lo]:
            tmp = a[hi]; a[hi] = a[lo]; a[lo] = tmp
        if a[hi] < a[mid]:
            tmp = a[hi]; a[hi] = a[mid]; a[mid] = tmp
        pivot = a[mid]
        i = lo
        j = hi
        while i <= j:
            while a[i] < pivot:
                i += 1
            while a[j] > pivot:
                j -= 1
            if i <= j:
                tmp = a[i]; a[i] = a[j]; a[j] = tmp
                i += 1
                j -= 1
        if j - lo < hi - i:
            if lo < j:
                _sort(a, lo, j)
            lo = i
        else:
            if i < hi:
                _sort(a, i, hi)
            hi = j
    _insertion_sort(a, lo, hi)


def mad0_batch(const double[:, ::1] samples, const double[::1] weights):
    """Raw MAD per row: dot(w, sort(|x - dot(w, sort(x))|)).

    ``weights`` must sum to 1 and have length equal to the row width.
    Returns a 1-D float64 array with one value per row.
    """
    cdef Py_ssize_t nrows = samples.shape[0]
    cdef Py_ssize_t n = samples.shape[1]
    if weights.shape[0] != n:
        raise ValueError("weights length must match sample width")
    out_arr = np.empty(nrows, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double* buf
    cdef Py_ssize_t r, i
    cdef double med, acc
    with nogil:
        buf = <double*> malloc(n * sizeof(double))
        if buf == NULL:
            with gil:
                raise MemoryError()
        for r in range(nrows):
            memcpy(buf, &samples[r, 0], n * sizeof(double))
            _sort(buf, 0, n - 1)
            med = 0.0
            for i in range(n):
                med += weights[i] * buf[i]
            for i in range(n):
                buf[i] = fabs(buf[i] - med)
            _sort(buf, 0, n - 1)
            acc = 0.0
            for i in range(n):
                acc += weights[i] * buf[i]
            out[r] = acc
        free(buf)
    return out_arr
