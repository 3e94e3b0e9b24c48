# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Must stay bit-identical to _purekern (see its docstring)."""

from libc.math cimport sqrt


cdef inline unsigned long long _mix(unsigned long long z) nogil:
    z = z + 0x9E3779B97F4A7C15ULL
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline unsigned long long _fnv_mix(const unsigned char* data, Py_ssize_t n,
                                        unsigned long long seed) nogil:
    cdef unsigned long long h = 0xCBF29CE484222325ULL
    cdef Py_ssize_t i
    for i in range(n):
        h ^= <unsigned long long>data[i]
        h = h * 0x100000001B3ULL
    return _mix(h ^ seed)


def token_hash(bytes data, seed):
    cdef const unsigned char[:] view = data
    cdef unsigned long long s = <unsigned long long>(seed & 0xFFFFFFFFFFFFFFFF)
    if len(data) == 0:
        return _fnv_mix(NULL, 0, s)
    return _fnv_mix(&view[0], view.shape[0], s)


def hash_scatter(double[::1] out, list tokens, double[::1] weights, seed):
    cdef unsigned long long s = <unsigned long long>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef unsigned long long mask = <unsigned long long>(out.shape[0] - 1)
    cdef unsigned long long h
    cdef Py_ssize_t i, n = len(tokens)
    cdef bytes tok
    cdef const unsigned char[:] view
    cdef double sign
    for i in range(n):
        tok = <bytes>tokens[i]
        if len(tok) == 0:
            h = _fnv_mix(NULL, 0, s)
        else:
            view = tok
            h = _fnv_mix(&view[0], view.shape[0], s)
        sign = 1.0 if (h >> 63) == 0 else -1.0
        out[<Py_ssize_t>(h & mask)] += sign * weights[i]


def rank_from_sims(double[::1] sims, Py_ssize_t correct_pos):
    cdef double sc = sims[correct_pos]
    cdef Py_ssize_t i, n = sims.shape[0]
    cdef long long greater = 0, equal_before = 0
    for i in range(n):
        if sims[i] > sc:
            greater += 1
        elif sims[i] == sc and i < correct_pos:
            equal_before += 1
    return 1 + greater + equal_before


def adam_update(double[::1] p, double[::1] g, double[::1] m, double[::1] v,
                double lr, double beta1, double beta2, double eps,
                double bc1, double bc2):
    cdef double omb1 = 1.0 - beta1
    cdef double omb2 = 1.0 - beta2
    cdef Py_ssize_t i, n = p.shape[0]
    cdef double t
    for i in range(n):
        m[i] = beta1 * m[i] + omb1 * g[i]
        t = g[i] * g[i]
        v[i] = beta2 * v[i] + omb2 * t
        p[i] = p[i] - lr * ((m[i] / bc1) / (sqrt(v[i] / bc2) + eps))
