# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: token feature hashing and sparse embedding ops.

Semantics must match `annokit.engine.kernels.pure` exactly (identical bucket
indices; gather/scatter differ only by float summation order).
"""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport uint8_t, uint64_t

cnp.import_array()

cdef uint64_t FNV_OFFSET = 14695981039346656037ULL
cdef uint64_t FNV_PRIME = 1099511628211ULL

cdef bytes BOS = b"<s>"
cdef bytes EOS = b"</s>"


cdef inline uint64_t fnv1a(const uint8_t* data, Py_ssize_t n, uint64_t h) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(n):
        h = (h ^ <uint64_t>data[i]) * FNV_PRIME
    return h


cdef uint64_t seed_state(uint64_t seed, int template):
    cdef uint8_t buf[8]
    cdef int i
    for i in range(8):
        buf[i] = <uint8_t>((seed >> (8 * i)) & 0xFF)
    cdef uint64_t h = fnv1a(buf, 8, FNV_OFFSET)
    cdef uint8_t t = <uint8_t>template
    return fnv1a(&t, 1, h)


cdef inline uint64_t bucket(const uint8_t* data, Py_ssize_t n, uint64_t state,
                            uint64_t n_buckets) noexcept nogil:
    return fnv1a(data, n, state) % n_buckets


def token_feature_buckets(list tokens, int n_buckets, seed):
    """Hash window features for each token; see the pure twin for the layout."""
    cdef Py_ssize_t n = len(tokens)
    cdef uint64_t nb = <uint64_t>n_buckets
    cdef uint64_t states[12]
    cdef int t_i
    cdef uint64_t seed_u = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    for t_i in range(12):
        states[t_i] = seed_state(seed_u, t_i)

    cdef list encoded = [(<str>tok).encode("utf-8") for tok in tokens]
    cdef list lowered = [(<str>tok).lower().encode("utf-8") for tok in tokens]

    # at most 12 features per token
    cdef cnp.ndarray[cnp.int64_t, ndim=1] idx = np.empty(12 * max(n, 1), dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] offsets = np.empty(n + 1, dtype=np.int64)
    cdef Py_ssize_t pos = 0
    cdef Py_ssize_t t, plen
    cdef bytes raw, low, nb_tok
    cdef const uint8_t* p
    cdef Py_ssize_t m

    offsets[0] = 0
    for t in range(n):
        raw = <bytes>encoded[t]
        p = raw
        m = len(raw)
        idx[pos] = <long long>bucket(p, m, states[0], nb); pos += 1
        low = <bytes>lowered[t]
        idx[pos] = <long long>bucket(<const uint8_t*>low, len(low), states[1], nb); pos += 1
        for plen in range(1, 4):
            if m >= plen:
                idx[pos] = <long long>bucket(p, plen, states[1 + plen], nb); pos += 1
        for plen in range(1, 4):
            if m >= plen:
                idx[pos] = <long long>bucket(p + (m - plen), plen, states[4 + plen], nb)
                pos += 1
        nb_tok = <bytes>encoded[t - 1] if t >= 1 else BOS
        idx[pos] = <long long>bucket(<const uint8_t*>nb_tok, len(nb_tok), states[8], nb); pos += 1
        nb_tok = <bytes>encoded[t + 1] if t + 1 < n else EOS
        idx[pos] = <long long>bucket(<const uint8_t*>nb_tok, len(nb_tok), states[9], nb); pos += 1
        nb_tok = <bytes>encoded[t - 2] if t >= 2 else BOS
        idx[pos] = <long long>bucket(<const uint8_t*>nb_tok, len(nb_tok), states[10], nb); pos += 1
        nb_tok = <bytes>encoded[t + 2] if t + 2 < n else EOS
        idx[pos] = <long long>bucket(<const uint8_t*>nb_tok, len(nb_tok), states[11], nb); pos += 1
        offsets[t + 1] = pos
    return idx[:pos].copy(), offsets


def gather_mean(cnp.ndarray[cnp.float64_t, ndim=2] table,
                cnp.ndarray[cnp.int64_t, ndim=1] idx,
                cnp.ndarray[cnp.int64_t, ndim=1] offsets):
    """Per-segment mean of table rows."""
    cdef Py_ssize_t n_seg = offsets.shape[0] - 1
    cdef Py_ssize_t dim = table.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((n_seg, dim), dtype=np.float64)
    cdef Py_ssize_t t, j, d, row
    cdef double inv
    with nogil:
        for t in range(n_seg):
            for j in range(offsets[t], offsets[t + 1]):
                row = idx[j]
                for d in range(dim):
                    out[t, d] += table[row, d]
            inv = 1.0 / <double>(offsets[t + 1] - offsets[t])
            for d in range(dim):
                out[t, d] *= inv
    return out


def scatter_add_mean(cnp.ndarray[cnp.float64_t, ndim=2] grad,
                     cnp.ndarray[cnp.int64_t, ndim=1] idx,
                     cnp.ndarray[cnp.int64_t, ndim=1] offsets,
                     cnp.ndarray[cnp.float64_t, ndim=2] out):
    """Backward of gather_mean: out[idx rows of segment t] += grad[t] / count_t."""
    cdef Py_ssize_t n_seg = offsets.shape[0] - 1
    cdef Py_ssize_t dim = out.shape[1]
    cdef Py_ssize_t t, j, d, row
    cdef double inv
    with nogil:
        for t in range(n_seg):
            inv = 1.0 / <double>(offsets[t + 1] - offsets[t])
            for j in range(offsets[t], offsets[t + 1]):
                row = idx[j]
                for d in range(dim):
                    out[row, d] += grad[t, d] * inv
    return None
