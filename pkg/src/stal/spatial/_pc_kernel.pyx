# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled path-consistency kernel; same contract as ``_pc_py``."""
from cpython cimport array
import array

from libc.stdlib cimport malloc, free


cdef inline unsigned int _compose(unsigned int m1, unsigned int m2,
                                  unsigned int[:] table, int size) nogil:
    cdef unsigned int out = 0
    cdef unsigned int low
    cdef int i
    while m1:
        low = m1 & (~m1 + 1)
        i = 0
        while (low >> i) != 1:
            i += 1
        out |= table[i * size + m2]
        m1 ^= low
    return out


def compose(unsigned int m1, unsigned int m2, comp_by_mask, int natoms):
    cdef array.array t = array.array('I', comp_by_mask)
    return _compose(m1, m2, t, 1 << natoms)


def refine(matrix, int n, comp_by_mask, conv_mask, int natoms):
    cdef array.array marr = array.array('I', matrix)
    cdef array.array tarr = array.array('I', comp_by_mask)
    cdef array.array carr = array.array('I', conv_mask)
    cdef unsigned int[:] m = marr
    cdef unsigned int[:] table = tarr
    cdef unsigned int[:] conv = carr
    cdef int size = 1 << natoms
    cdef int i, j, k, a, b, head, tail, cap, count
    cdef unsigned int rij, cur, new
    cdef int *qi
    cdef int *qj
    cdef char *queued
    for i in range(n * n):
        if m[i] == 0:
            return None
    cap = n * n + 1
    qi = <int *> malloc(cap * sizeof(int))
    qj = <int *> malloc(cap * sizeof(int))
    queued = <char *> malloc(n * n * sizeof(char))
    if qi == NULL or qj == NULL or queued == NULL:
        free(qi); free(qj); free(queued)
        raise MemoryError()
    try:
        for i in range(n * n):
            queued[i] = 0
        head = 0
        tail = 0
        count = 0
        for i in range(n):
            for j in range(i + 1, n):
                qi[tail] = i; qj[tail] = j
                tail = (tail + 1) % cap
                count += 1
                queued[i * n + j] = 1
        while count:
            i = qi[head]; j = qj[head]
            head = (head + 1) % cap
            count -= 1
            queued[i * n + j] = 0
            rij = m[i * n + j]
            for k in range(n):
                if k == i or k == j:
                    continue
                cur = m[i * n + k]
                new = cur & _compose(rij, m[j * n + k], table, size)
                if new != cur:
                    if new == 0:
                        return None
                    m[i * n + k] = new
                    m[k * n + i] = conv[new]
                    if i < k:
                        a = i; b = k
                    else:
                        a = k; b = i
                    if not queued[a * n + b]:
                        queued[a * n + b] = 1
                        qi[tail] = a; qj[tail] = b
                        tail = (tail + 1) % cap
                        count += 1
                cur = m[k * n + j]
                new = cur & _compose(m[k * n + i], rij, table, size)
                if new != cur:
                    if new == 0:
                        return None
                    m[k * n + j] = new
                    m[j * n + k] = conv[new]
                    if k < j:
                        a = k; b = j
                    else:
                        a = j; b = k
                    if not queued[a * n + b]:
                        queued[a * n + b] = 1
                        qi[tail] = a; qj[tail] = b
                        tail = (tail + 1) % cap
                        count += 1
        return list(marr)
    finally:
        free(qi); free(qj); free(queued)
