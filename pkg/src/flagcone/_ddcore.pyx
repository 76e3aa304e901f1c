# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled adjacency kernel for the double description method.

Same contract as flagcone._ddpure.adjacency_pairs, with masks packed into
rows of 64-bit words.  The inner loops run without the GIL, so the caller
may chunk the positive index range across threads for real parallelism.
"""

from libc.stdint cimport uint64_t, int32_t


cdef inline int popcount64(uint64_t x) noexcept nogil:
    x = x - ((x >> 1) & 0x5555555555555555ULL)
    x = (x & 0x3333333333333333ULL) + ((x >> 2) & 0x3333333333333333ULL)
    x = (x + (x >> 4)) & 0x0F0F0F0F0F0F0F0FULL
    return <int>((x * 0x0101010101010101ULL) >> 56)


# Masks wider than MAX_WORDS * 64 inserted rows fall back to the pure kernel.
MAX_WORDS = 16
cdef int _MAX_WORDS = 16


def adjacency_pairs_packed(
    uint64_t[:, ::1] masks,
    int32_t[::1] pos,
    int32_t[::1] neg,
    int need,
    int32_t[::1] out_i,
    int32_t[::1] out_j,
):
    """Fill out_i/out_j with passing pairs; return the count.

    The output buffers must hold len(pos) * len(neg) entries, the worst case,
    so no overflow check is needed inside the loop.
    """
    cdef Py_ssize_t npos = pos.shape[0]
    cdef Py_ssize_t nneg = neg.shape[0]
    cdef Py_ssize_t nall = masks.shape[0]
    cdef Py_ssize_t w = masks.shape[1]
    cdef Py_ssize_t a, b, t, k, cnt
    cdef int32_t i, j
    cdef int pc
    cdef bint dominated, sub
    cdef uint64_t z[16]

    if w > _MAX_WORDS:
        raise ValueError("mask wider than compiled kernel supports")

    cnt = 0
    with nogil:
        for a in range(npos):
            i = pos[a]
            for b in range(nneg):
                j = neg[b]
                pc = 0
                for k in range(w):
                    z[k] = masks[i, k] & masks[j, k]
                    pc += popcount64(z[k])
                if pc < need:
                    continue
                dominated = False
                for t in range(nall):
                    if t == i or t == j:
                        continue
                    sub = True
                    for k in range(w):
                        if z[k] & ~masks[t, k]:
                            sub = False
                            break
                    if sub:
                        dominated = True
                        break
                if not dominated:
                    out_i[cnt] = i
                    out_j[cnt] = j
                    cnt += 1
    return cnt
