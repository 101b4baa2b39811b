"""Pure-Python loop-Hafnian kernels, used when the compiled extension is absent.

Same signatures and summation order as ``_kernels.pyx``.
"""
import numpy as np


def lhaf_enum(a, f, loops):
    """Sum over (loop-)matchings by expanding the lowest unmatched vertex first."""
    a = np.ascontiguousarray(a, dtype=complex)
    f = np.ascontiguousarray(f, dtype=complex)
    n = a.shape[0]
    if not loops and n % 2:
        return 0j
    rows = a.tolist()
    fl = f.tolist()

    def rec(free):
        if not free:
            return 1 + 0j
        i = free[0]
        rest = free[1:]
        total = 0j
        if loops:
            total += fl[i] * rec(rest)
        row = rows[i]
        for k, j in enumerate(rest):
            total += row[j] * rec(rest[:k] + rest[k + 1:])
        return total

    return complex(rec(tuple(range(n))))


def lhaf_repeated(a, f, mult, loops):
    """Loop Hafnian of the matrix with index i repeated mult[i] times.

    Dynamic programme over remaining multiplicities in mixed radix; the
    lowest index still present is always the one matched next.
    """
    a = np.ascontiguousarray(a, dtype=complex)
    f = np.ascontiguousarray(f, dtype=complex)
    mult = [int(m) for m in mult]
    d = len(mult)
    strides = [1] * d
    for k in range(1, d):
        strides[k] = strides[k - 1] * (mult[k - 1] + 1)
    size = strides[-1] * (mult[-1] + 1) if d else 1
    table = [0j] * size
    table[0] = 1 + 0j
    digits = [0] * d
    rows = a.tolist()
    fl = f.tolist()
    for code in range(1, size):
        i = 0
        while digits[i] == mult[i]:
            digits[i] = 0
            i += 1
        digits[i] += 1
        ri = digits[i]
        base = code - strides[i]
        acc = fl[i] * table[base] if loops else 0j
        row = rows[i]
        if ri >= 2:
            acc += (ri - 1) * row[i] * table[base - strides[i]]
        for j in range(i + 1, d):
            rj = digits[j]
            if rj:
                acc += rj * row[j] * table[base - strides[j]]
        table[code] = acc
    return complex(table[size - 1])
