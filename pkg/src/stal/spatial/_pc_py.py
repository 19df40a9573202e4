"""Pure-Python path-consistency kernel (fallback for the compiled one).

The network is an ``n*n`` row-major list of relation masks kept converse
consistent: ``m[j*n+i] == conv[m[i*n+j]]``.
"""
from collections import deque


def compose(m1, m2, comp_by_mask, natoms):
    size = 1 << natoms
    out = 0
    while m1:
        low = m1 & -m1
        out |= comp_by_mask[(low.bit_length() - 1) * size + m2]
        m1 ^= low
    return out


def refine(matrix, n, comp_by_mask, conv_mask, natoms):
    """Run path consistency in place; return the matrix or None on an empty relation."""
    m = list(matrix)
    if 0 in m:
        return None
    size = 1 << natoms
    queue = deque((i, j) for i in range(n) for j in range(i + 1, n))
    queued = {p: True for p in queue}
    while queue:
        i, j = queue.popleft()
        queued[(i, j)] = False
        rij = m[i * n + j]
        for k in range(n):
            if k == i or k == j:
                continue
            # C(i,k) <- C(i,k) & C(i,j);C(j,k)
            cur = m[i * n + k]
            b, out = rij, 0
            while b:
                low = b & -b
                out |= comp_by_mask[(low.bit_length() - 1) * size + m[j * n + k]]
                b ^= low
            new = cur & out
            if new != cur:
                if not new:
                    return None
                m[i * n + k] = new
                m[k * n + i] = conv_mask[new]
                p = (i, k) if i < k else (k, i)
                if not queued.get(p):
                    queued[p] = True
                    queue.append(p)
            # C(k,j) <- C(k,j) & C(k,i);C(i,j)
            cur = m[k * n + j]
            b, out = m[k * n + i], 0
            while b:
                low = b & -b
                out |= comp_by_mask[(low.bit_length() - 1) * size + rij]
                b ^= low
            new = cur & out
            if new != cur:
                if not new:
                    return None
                m[k * n + j] = new
                m[j * n + k] = conv_mask[new]
                p = (k, j) if k < j else (j, k)
                if not queued.get(p):
                    queued[p] = True
                    queue.append(p)
    return m
