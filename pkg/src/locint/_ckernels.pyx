# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twins of the _kernels reference implementations.

Fast paths run in C integers (unsigned 64-bit sums, 128-bit products)
whenever bit-length prechecks prove no overflow is possible; otherwise
the code falls back to Python integers, so results match the pure
backend bit for bit.
"""

from libc.stdlib cimport free, malloc

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"


def superset_sums(values, int n):
    cdef Py_ssize_t size = 1 << n
    cdef Py_ssize_t mask, i
    cdef unsigned long long bit
    cdef unsigned long long *buf
    cdef object total = 0
    for v in values:
        total += v
    # Sums are monotone under the transform: every entry is bounded by
    # the grand total, so 64-bit staging is safe when the total fits.
    if isinstance(total, int) and total >= 0 and total.bit_length() < 63:
        buf = <unsigned long long *> malloc(size * sizeof(unsigned long long))
        if buf == NULL:
            raise MemoryError()
        try:
            for mask in range(size):
                buf[mask] = values[mask]
            for i in range(n):
                bit = 1ULL << i
                for mask in range(size):
                    if not mask & bit:
                        buf[mask] += buf[mask | bit]
            return [buf[mask] for mask in range(size)]
        finally:
            free(buf)
    out = list(values)
    for i in range(n):
        bit = 1 << i
        for mask in range(size):
            if not mask & bit:
                out[mask] = out[mask] + out[mask | bit]
    return out


cdef object _py_ratio(object full, object denominator, object block_sums):
    num = full
    for _ in range(len(block_sums) - 1):
        num = num * denominator
    den = 1
    for value in block_sums:
        den = den * value
    return num, den


def partition_ratios(subset_sums, denominator, partitions):
    cdef unsigned long long full64 = 0, den64 = 0
    cdef u128 num128, den128
    cdef int dbits, fbits, k, safe, bits_den, vbits
    cdef Py_ssize_t i
    full = subset_sums[len(subset_sums) - 1]
    use_c = (isinstance(full, int) and isinstance(denominator, int)
             and full > 0 and denominator > 0
             and denominator.bit_length() < 63 and full.bit_length() < 63)
    if use_c:
        full64 = full
        den64 = denominator
        dbits = (<object> denominator).bit_length()
        fbits = (<object> full).bit_length()
    out = []
    for blocks in partitions:
        if use_c:
            k = len(blocks)
            safe = fbits + (k - 1) * dbits < 127
            if safe:
                num128 = full64
                for i in range(k - 1):
                    num128 = num128 * den64
                den128 = 1
                bits_den = 0
                for mask in blocks:
                    value = subset_sums[mask]
                    vbits = (<object> value).bit_length()
                    bits_den += vbits
                    if vbits >= 63 or bits_den >= 127:
                        safe = 0
                        break
                    den128 = den128 * <unsigned long long> value
                if safe:
                    out.append((_u128_to_int(num128), _u128_to_int(den128)))
                    continue
        block_sums = [subset_sums[mask] for mask in blocks]
        out.append(_py_ratio(full, denominator, block_sums))
    return out


cdef object _u128_to_int(u128 v):
    cdef unsigned long long hi = <unsigned long long> (v >> 64)
    cdef unsigned long long lo = <unsigned long long> (v & <u128> 0xFFFFFFFFFFFFFFFFULL)
    if hi == 0:
        return lo
    return ((<object> hi) << 64) | (<object> lo)
