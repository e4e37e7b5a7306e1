# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Floyd-Warshall closure on int64 with overflow detection.

Same contract as ``tpntwin._kernel_py.close_flat`` except that it returns
``None`` when an entry does not fit in int64 or an addition overflows; the
caller then reruns the exact pure-Python path.
"""

from libc.stdint cimport int64_t, INT64_MAX
from libc.stdlib cimport malloc, free

cdef extern from *:
    """
    static inline int tpn_add_overflow(long long a, long long b, long long *r) {
        return __builtin_add_overflow(a, b, r);
    }
    """
    int tpn_add_overflow(long long a, long long b, long long *r) nogil



cdef int _close(int64_t *d, Py_ssize_t n) noexcept nogil:
    # 0: consistent, 1: negative cycle, 2: overflow
    cdef Py_ssize_t i, j, k
    cdef int64_t dik, dkj
    cdef long long s
    for k in range(n):
        for i in range(n):
            dik = d[i * n + k]
            if dik == INT64_MAX:
                continue
            for j in range(n):
                dkj = d[k * n + j]
                if dkj == INT64_MAX:
                    continue
                if tpn_add_overflow(dik, dkj, &s) or s == INT64_MAX:
                    return 2
                if s < d[i * n + j]:
                    d[i * n + j] = s
        for i in range(n):
            if d[i * n + i] < 0:
                return 1
    return 0


def close_flat(list cells, Py_ssize_t n):
    cdef Py_ssize_t size = n * n, idx
    cdef int64_t *d
    cdef int status
    cdef object v
    if len(cells) != size:
        raise ValueError("matrix size mismatch")
    d = <int64_t *> malloc(max(size, 1) * sizeof(int64_t))
    if d == NULL:
        raise MemoryError()
    try:
        for idx in range(size):
            v = cells[idx]
            if v is None:
                d[idx] = INT64_MAX
            else:
                try:
                    d[idx] = v
                except OverflowError:
                    return None
                if d[idx] == INT64_MAX:
                    return None
        with nogil:
            status = _close(d, n)
        if status == 2:
            return None
        if status == 1:
            return (None, False)
        return ([None if d[idx] == INT64_MAX else d[idx] for idx in range(size)], True)
    finally:
        free(d)
