# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled loop-Hafnian kernels; mirrors ``_kernels_py`` term for term."""
import numpy as np

ctypedef double complex cplx

cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil


cdef cplx _enum(const cplx[:, ::1] a, const cplx[::1] f, unsigned long long free, bint loops) noexcept nogil:
    cdef int i, j
    cdef unsigned long long rest, m
    cdef cplx total = 0
    if free == 0:
        return 1
    i = __builtin_ctzll(free)
    rest = free & (free - 1)
    if loops:
        total = f[i] * _enum(a, f, rest, loops)
    m = rest
    while m:
        j = __builtin_ctzll(m)
        m &= m - 1
        total = total + a[i, j] * _enum(a, f, rest & ~(1ULL << j), loops)
    return total


def lhaf_enum(a, f, bint loops):
    cdef const cplx[:, ::1] av = np.ascontiguousarray(a, dtype=complex)
    cdef const cplx[::1] fv = np.ascontiguousarray(f, dtype=complex)
    cdef int n = av.shape[0]
    cdef cplx out
    if n > 63:
        raise ValueError("enumeration supports at most 63 vertices")
    if not loops and n % 2:
        return 0j
    cdef unsigned long long free = (1ULL << n) - 1
    with nogil:
        out = _enum(av, fv, free, loops)
    return complex(out)


def lhaf_repeated(a, f, mult, bint loops):
    cdef const cplx[:, ::1] av = np.ascontiguousarray(a, dtype=complex)
    cdef const cplx[::1] fv = np.ascontiguousarray(f, dtype=complex)
    cdef long long[::1] mv = np.ascontiguousarray(mult, dtype=np.int64)
    cdef Py_ssize_t d = mv.shape[0]
    cdef long long[::1] strides = np.ones(max(d, 1), dtype=np.int64)
    cdef long long[::1] digits = np.zeros(max(d, 1), dtype=np.int64)
    cdef Py_ssize_t k, i, j
    cdef long long size = 1, code, base, ri, rj
    cdef cplx acc
    for k in range(d):
        strides[k] = size
        size *= mv[k] + 1
    table_arr = np.zeros(size, dtype=complex)
    cdef cplx[::1] table = table_arr
    table[0] = 1
    with nogil:
        for code in range(1, size):
            i = 0
            while digits[i] == mv[i]:
                digits[i] = 0
                i += 1
            digits[i] += 1
            ri = digits[i]
            base = code - strides[i]
            if loops:
                acc = fv[i] * table[base]
            else:
                acc = 0
            if ri >= 2:
                acc = acc + (ri - 1) * av[i, i] * table[base - strides[i]]
            for j in range(i + 1, d):
                rj = digits[j]
                if rj:
                    acc = acc + rj * av[i, j] * table[base - strides[j]]
            table[code] = acc
    return complex(table[size - 1])
