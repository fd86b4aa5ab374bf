# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled versions of the functions in ``ctacp._pykernels``."""

from cpython.bytes cimport PyBytes_FromStringAndSize, PyBytes_AS_STRING
from libc.stdlib cimport malloc, free, qsort
from libc.stdint cimport int64_t

cdef unsigned char NOT_T[3]
NOT_T[:] = [1, 0, 2]
cdef unsigned char AND_T[9]
AND_T[:] = [0, 0, 0, 0, 1, 2, 0, 2, 2]
cdef unsigned char OR_T[9]
OR_T[:] = [0, 1, 2, 1, 1, 1, 2, 1, 2]
cdef unsigned char IMP_T[9]
IMP_T[:] = [1, 1, 1, 0, 1, 2, 0, 1, 2]


cdef bytes _binary(const unsigned char[:] a, const unsigned char[:] b, unsigned char* table):
    cdef Py_ssize_t n = a.shape[0], i
    if b.shape[0] != n:
        raise ValueError("truth vectors differ in length")
    cdef bytes out = PyBytes_FromStringAndSize(NULL, n)
    cdef unsigned char* p = <unsigned char*> PyBytes_AS_STRING(out)
    for i in range(n):
        p[i] = table[3 * a[i] + b[i]]
    return out


def vec_not(const unsigned char[:] a):
    cdef Py_ssize_t n = a.shape[0], i
    cdef bytes out = PyBytes_FromStringAndSize(NULL, n)
    cdef unsigned char* p = <unsigned char*> PyBytes_AS_STRING(out)
    for i in range(n):
        p[i] = NOT_T[a[i]]
    return out


def vec_and(a, b):
    return _binary(a, b, AND_T)


def vec_or(a, b):
    return _binary(a, b, OR_T)


def vec_imp(a, b):
    return _binary(a, b, IMP_T)


cdef Py_ssize_t pow3(int k):
    cdef Py_ssize_t r = 1
    for _ in range(k):
        r *= 3
    return r


def atom_vector(int index, int n_atoms):
    if not 0 <= index < n_atoms:
        raise ValueError("atom index out of range")
    cdef Py_ssize_t total = pow3(n_atoms), run = pow3(n_atoms - index - 1), i
    cdef bytes out = PyBytes_FromStringAndSize(NULL, total)
    cdef unsigned char* p = <unsigned char*> PyBytes_AS_STRING(out)
    for i in range(total):
        p[i] = (i // run) % 3
    return out


def sat_indices(const unsigned char[:] a, const unsigned char[:] b):
    cdef Py_ssize_t n = min(a.shape[0], b.shape[0]), i
    cdef list out = []
    for i in range(n):
        if a[i] and b[i]:
            out.append(i)
    return out


cdef int _cmp64(const void* x, const void* y) noexcept nogil:
    cdef int64_t u = (<int64_t*> x)[0], v = (<int64_t*> y)[0]
    return (u > v) - (u < v)


def refine_once(Py_ssize_t n_states, block, offsets, labels, targets):
    cdef Py_ssize_t s, lo, hi, k, m, width = 0
    cdef int64_t nb = max(block) + 1 if n_states else 1
    cdef long[:] blk = _as_long(block)
    cdef long[:] off = _as_long(offsets)
    cdef long[:] lab = _as_long(labels)
    cdef long[:] dst = _as_long(targets)
    for s in range(n_states):
        width = max(width, off[s + 1] - off[s])
    cdef int64_t* buf = <int64_t*> malloc(max(width, 1) * sizeof(int64_t))
    if buf == NULL:
        raise MemoryError()
    cdef dict ids = {}
    cdef list out = [0] * n_states
    try:
        for s in range(n_states):
            lo = off[s]
            hi = off[s + 1]
            for k in range(lo, hi):
                buf[k - lo] = lab[k] * nb + blk[dst[k]]
            qsort(buf, hi - lo, sizeof(int64_t), _cmp64)
            m = 0
            for k in range(hi - lo):
                if m == 0 or buf[k] != buf[m - 1]:
                    buf[m] = buf[k]
                    m += 1
            key = (blk[s], PyBytes_FromStringAndSize(<char*> buf, m * sizeof(int64_t)))
            bid = ids.get(key)
            if bid is None:
                bid = len(ids)
                ids[key] = bid
            out[s] = bid
    finally:
        free(buf)
    return out


cdef long[:] _as_long(seq):
    import array
    return array.array("l", seq)
