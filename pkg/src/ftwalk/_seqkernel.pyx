# cython: boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled backend for the sequence-search kernel.

Same contract as ``ftwalk._seqkernel_py``: expand a generation of canonical
ring encodings by the six gates, deduplicate candidates keeping the smallest
word key, and test membership against earlier generations.  Rows are sorted
lexicographically over the signed int32 columns with the key as tiebreak,
matching NumPy's ``lexsort`` semantics exactly so both backends are
interchangeable bit for bit.
"""

import numpy as np

from libc.stdint cimport int32_t, int64_t, uint8_t, uint32_t, uint64_t
from libc.stdlib cimport free, malloc

cdef extern from *:
    """
    #include <algorithm>
    #include <cstdint>
    #include <cstring>

    struct SeqRec {
        int32_t enc[17];
        uint64_t key;
        uint32_t parent;
        uint8_t gate;
    };

    static inline bool seq_rec_less(const SeqRec &a, const SeqRec &b) {
        for (int c = 0; c < 17; ++c) {
            if (a.enc[c] != b.enc[c]) return a.enc[c] < b.enc[c];
        }
        return a.key < b.key;
    }

    static void seq_sort_recs(SeqRec *begin, size_t n) {
        std::sort(begin, begin + n, seq_rec_less);
    }
    """
    cdef struct SeqRec:
        int32_t enc[17]
        uint64_t key
        uint32_t parent
        uint8_t gate
    void seq_sort_recs(SeqRec *begin, size_t n) nogil

cdef enum:
    ENC_WIDTH = 17
    GUARD = 268435456  # 1 << 28


cdef inline bint _reduce_matrix(int32_t *e, int32_t *k) nogil:
    """Divide the 4-entry matrix by sqrt(2) while possible and k > 0."""
    cdef int i
    cdef int32_t c0, c1, c2, c3
    cdef bint reducible
    while k[0] > 0:
        reducible = True
        for i in range(4):
            if ((e[4 * i] - e[4 * i + 2]) & 1) != 0 or ((e[4 * i + 1] - e[4 * i + 3]) & 1) != 0:
                reducible = False
                break
        if not reducible:
            return True
        for i in range(4):
            c0 = e[4 * i]
            c1 = e[4 * i + 1]
            c2 = e[4 * i + 2]
            c3 = e[4 * i + 3]
            e[4 * i] = (c1 - c3) >> 1
            e[4 * i + 1] = (c0 + c2) >> 1
            e[4 * i + 2] = (c1 + c3) >> 1
            e[4 * i + 3] = (c2 - c0) >> 1
        k[0] -= 1
    return True


cdef inline bint _fill_child(const int32_t *src, int gate, int32_t *dst) nogil:
    """Write the child encoding of ``src`` under right-multiplication by gate.

    Layout per row: [k, m00(4), m01(4), m10(4), m11(4)]; the second column of
    the matrix is coefficient blocks m01 (offset 5) and m11 (offset 13).
    Returns False on coefficient overflow (H only; phase gates permute).
    """
    cdef int i, _c, base
    cdef int32_t k = src[0]
    cdef int32_t a0, a1, a2, a3, b0, b1
    cdef int32_t *e = dst + 1
    if gate == 0:  # H mixes the two columns and raises k
        for i in range(2):  # i = row of the matrix
            base = 8 * i
            for _c in range(4):
                b0 = src[1 + base + _c] + src[5 + base + _c]
                b1 = src[1 + base + _c] - src[5 + base + _c]
                if b0 >= GUARD or b0 <= -GUARD or b1 >= GUARD or b1 <= -GUARD:
                    return False
                e[base + _c] = b0
                e[4 + base + _c] = b1
        k += 1
        dst[0] = k
        _reduce_matrix(e, dst)
        return True
    if gate == 1:  # X swaps the columns
        for i in range(2):
            base = 8 * i
            for _c in range(4):
                e[base + _c] = src[5 + base + _c]
                e[4 + base + _c] = src[1 + base + _c]
        dst[0] = k
        return True
    # Remaining gates rescale the second column by a ring unit.
    for i in range(2):
        base = 8 * i
        for _c in range(4):
            e[base + _c] = src[1 + base + _c]
    for i in range(2):
        base = 5 + 8 * i
        a0 = src[base]
        a1 = src[base + 1]
        a2 = src[base + 2]
        a3 = src[base + 3]
        if gate == 2:  # Z: times -1
            e[base - 1] = -a0
            e[base] = -a1
            e[base + 1] = -a2
            e[base + 2] = -a3
        elif gate == 3:  # T: times w
            e[base - 1] = -a3
            e[base] = a0
            e[base + 1] = a1
            e[base + 2] = a2
        elif gate == 4:  # S: times w^2
            e[base - 1] = -a2
            e[base] = -a3
            e[base + 1] = a0
            e[base + 2] = a1
        else:  # s: times -w^2
            e[base - 1] = a2
            e[base] = a3
            e[base + 1] = -a0
            e[base + 2] = -a1
    dst[0] = k
    return True


def expand_dedup(int32_t[:, ::1] enc, uint32_t[::1] wordrank):
    cdef Py_ssize_t n = enc.shape[0]
    cdef Py_ssize_t total = 6 * n
    if total == 0:
        return (
            np.empty((0, ENC_WIDTH), dtype=np.int32),
            np.empty(0, dtype=np.uint64),
            np.empty(0, dtype=np.uint32),
            np.empty(0, dtype=np.uint8),
        )
    cdef SeqRec *recs = <SeqRec *> malloc(total * sizeof(SeqRec))
    if recs == NULL:
        raise MemoryError("candidate buffer allocation failed")
    cdef Py_ssize_t i, out
    cdef int g
    cdef bint ok = True
    with nogil:
        for i in range(n):
            for g in range(6):
                if not _fill_child(&enc[i, 0], g, recs[6 * i + g].enc):
                    ok = False
                    break
                recs[6 * i + g].key = (<uint64_t> wordrank[i]) * 6 + <uint64_t> g
                recs[6 * i + g].parent = <uint32_t> i
                recs[6 * i + g].gate = <uint8_t> g
            if not ok:
                break
        if ok:
            seq_sort_recs(recs, <size_t> total)
    if not ok:
        free(recs)
        raise OverflowError("search coefficients exceeded the int32 safety bound")

    cdef Py_ssize_t unique = 0
    cdef int c
    cdef bint same
    with nogil:
        for i in range(total):
            if i == 0:
                unique += 1
                continue
            same = True
            for c in range(ENC_WIDTH):
                if recs[i].enc[c] != recs[i - 1].enc[c]:
                    same = False
                    break
            if not same:
                unique += 1

    out_enc_arr = np.empty((unique, ENC_WIDTH), dtype=np.int32)
    out_key_arr = np.empty(unique, dtype=np.uint64)
    out_parent_arr = np.empty(unique, dtype=np.uint32)
    out_gate_arr = np.empty(unique, dtype=np.uint8)
    cdef int32_t[:, ::1] out_enc = out_enc_arr
    cdef uint64_t[::1] out_key = out_key_arr
    cdef uint32_t[::1] out_parent = out_parent_arr
    cdef uint8_t[::1] out_gate = out_gate_arr
    with nogil:
        out = -1
        for i in range(total):
            same = False
            if i > 0:
                same = True
                for c in range(ENC_WIDTH):
                    if recs[i].enc[c] != recs[i - 1].enc[c]:
                        same = False
                        break
            if not same:
                out += 1
                for c in range(ENC_WIDTH):
                    out_enc[out, c] = recs[i].enc[c]
                out_key[out] = recs[i].key
                out_parent[out] = recs[i].parent
                out_gate[out] = recs[i].gate
    free(recs)
    return out_enc_arr, out_key_arr, out_parent_arr, out_gate_arr


cdef inline int _cmp_rows(const int32_t *a, const int32_t *b) nogil:
    cdef int c
    for c in range(ENC_WIDTH):
        if a[c] != b[c]:
            return -1 if a[c] < b[c] else 1
    return 0


def member_mask(int32_t[:, ::1] cand, list generations):
    """Merge-join each sorted generation against the sorted candidates."""
    cdef Py_ssize_t n = cand.shape[0]
    mask_arr = np.zeros(n, dtype=bool)
    cdef uint8_t[::1] mask = mask_arr.view(np.uint8)
    cdef int32_t[:, ::1] gen
    cdef Py_ssize_t i, j, m
    cdef int rel
    for arr in generations:
        gen = arr
        m = gen.shape[0]
        if m == 0:
            continue
        with nogil:
            i = 0
            j = 0
            while i < n and j < m:
                rel = _cmp_rows(&cand[i, 0], &gen[j, 0])
                if rel == 0:
                    mask[i] = 1
                    i += 1
                    j += 1
                elif rel < 0:
                    i += 1
                else:
                    j += 1
    return mask_arr
