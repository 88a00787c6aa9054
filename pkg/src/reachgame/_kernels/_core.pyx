# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the hot inner loops.

Both functions mirror ``_numpy_impl`` exactly but walk transition rows in
compressed-sparse form, which pays off on games whose kernels have few
successors per (state, action) -- e.g. grid worlds.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"


def _csr(matrix):
    """Dense (R, C) -> (indptr, indices, data) over nonzero entries."""
    m = np.ascontiguousarray(matrix, dtype=np.float64)
    rows, cols = np.nonzero(m)
    indptr = np.zeros(m.shape[0] + 1, dtype=np.int64)
    np.add.at(indptr, rows + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, cols.astype(np.int64), m[rows, cols]


cdef void _axis_contract(
    const double[::1] src,
    double[::1] out,
    const long[::1] indptr,
    const long[::1] indices,
    const double[::1] data,
    Py_ssize_t outer,
    Py_ssize_t states,
    Py_ssize_t inner,
) noexcept nogil:
    cdef Py_ssize_t o, s, k, i, dst_base, src_base
    cdef double coeff
    for o in range(outer):
        for s in range(states):
            dst_base = (o * states + s) * inner
            for k in range(indptr[s], indptr[s + 1]):
                coeff = data[k]
                src_base = (o * states + indices[k]) * inner
                for i in range(inner):
                    out[dst_base + i] += coeff * src[src_base + i]


def masked_value_contract(v_next, kernels, mask):
    """See ``_numpy_impl.masked_value_contract``."""
    cdef Py_ssize_t n = len(kernels)
    cdef Py_ssize_t s_count = kernels[0].shape[0]
    cdef Py_ssize_t outer = 1
    cdef Py_ssize_t inner = v_next.shape[0] // s_count
    work = np.ascontiguousarray(v_next, dtype=np.float64).copy()
    cdef Py_ssize_t j
    for j in range(n):
        indptr, indices, data = _csr(kernels[j])
        out = np.zeros_like(work)
        _axis_contract(work, out, indptr, indices, data, outer, s_count, inner)
        work = out
        outer *= s_count
        inner //= s_count
    return np.asarray(mask, dtype=np.float64) * work


cdef void _accumulate_entries(
    const double[::1] v_next,
    const long[::1] k_indptr,
    const long[::1] k_indices,
    const double[::1] k_data,
    Py_ssize_t s_count,
    Py_ssize_t a_count,
    Py_ssize_t low_radix,
    const long[:, ::1] src_digits,
    const unsigned char[::1] internal_ok,
    const long[::1] dst_base,
    const double[::1] mass,
    double[::1] u,
    double[:, ::1] values,
) noexcept nogil:
    cdef Py_ssize_t n_entries = dst_base.shape[0]
    cdef Py_ssize_t m = src_digits.shape[1]
    cdef Py_ssize_t e, c, s, a, k, d, row
    cdef double w, q
    cdef bint blocked
    for e in range(n_entries):
        if not internal_ok[e]:
            continue
        w = mass[e]
        for c in range(s_count):
            u[c] = v_next[dst_base[e] + c * low_radix]
        for s in range(s_count):
            blocked = 0
            for d in range(m):
                if src_digits[e, d] == s:
                    blocked = 1
                    break
            if blocked:
                continue
            row = s * a_count
            for a in range(a_count):
                q = 0.0
                for k in range(k_indptr[row + a], k_indptr[row + a + 1]):
                    q += k_data[k] * u[k_indices[k]]
                values[s, a] += w * q


def br_action_values(
    v_next,
    own_kernel,
    player,
    n_players,
    src_digits,
    internal_ok,
    dst,
    mass,
):
    """See ``_numpy_impl.br_action_values``."""
    cdef Py_ssize_t s_count = own_kernel.shape[0]
    cdef Py_ssize_t a_count = own_kernel.shape[1]
    values = np.zeros((s_count, a_count))
    if dst.shape[0] == 0:
        return values
    cdef Py_ssize_t low_radix = s_count ** (n_players - 1 - player)
    indptr, indices, data = _csr(own_kernel.reshape(s_count * a_count, s_count))
    dst_arr = np.asarray(dst, dtype=np.int64)
    dst_base = (dst_arr // low_radix) * (low_radix * s_count) + dst_arr % low_radix
    u = np.empty(s_count)
    _accumulate_entries(
        np.ascontiguousarray(v_next, dtype=np.float64),
        indptr,
        indices,
        data,
        s_count,
        a_count,
        low_radix,
        np.ascontiguousarray(src_digits, dtype=np.int64),
        np.ascontiguousarray(internal_ok, dtype=np.uint8),
        np.ascontiguousarray(dst_base, dtype=np.int64),
        np.ascontiguousarray(mass, dtype=np.float64),
        u,
        values,
    )
    return values
