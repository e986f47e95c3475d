# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled versions of the hot kernels; see ``_pykernels`` for semantics."""

from itertools import combinations


def rank_int(rows):
    cdef list a = [list(row_) for row_ in rows]
    cdef Py_ssize_t nrows = len(a)
    if nrows == 0:
        return 0
    cdef Py_ssize_t ncols = len(a[0])
    cdef Py_ssize_t rank = 0, col, r, c, piv
    cdef object prev = 1, p, f
    cdef list prow, row
    for col in range(ncols):
        if rank == nrows:
            break
        piv = -1
        for r in range(rank, nrows):
            if (<list>a[r])[col] != 0:
                piv = r
                break
        if piv < 0:
            continue
        if piv != rank:
            a[piv], a[rank] = a[rank], a[piv]
        prow = <list>a[rank]
        p = prow[col]
        for r in range(rank + 1, nrows):
            row = <list>a[r]
            f = row[col]
            if f == 0:
                for c in range(col + 1, ncols):
                    row[c] = (p * row[c]) // prev
            else:
                for c in range(col + 1, ncols):
                    row[c] = (p * row[c] - f * prow[c]) // prev
            row[col] = 0
        prev = p
        rank += 1
    return rank


def step2_bracket(x, y, list table, Py_ssize_t out_dim):
    cdef list out = [0] * out_dim
    cdef list xs = list(x)
    cdef list ys = list(y)
    cdef Py_ssize_t a, b, idx
    cdef object s
    cdef tuple entry, term
    for entry in table:
        a = <Py_ssize_t>entry[0]
        b = <Py_ssize_t>entry[1]
        s = xs[a] * ys[b] - xs[b] * ys[a]
        if s:
            for term in <list>entry[2]:
                idx = <Py_ssize_t>term[0]
                out[idx] = out[idx] + s * term[1]
    return out


def pfaffian_table(A, Py_ssize_t max_size):
    cdef Py_ssize_t n = len(A)
    cdef dict table = {0: 1}
    cdef dict layer = {0: 1}
    cdef dict nxt
    cdef Py_ssize_t size = 0, pos, i0, j, k
    cdef long long mask
    cdef object total, aij, sub
    cdef list bits
    cdef list rows = [list(row_) for row_ in A]
    while size + 2 <= max_size and size + 2 <= n:
        size += 2
        nxt = {}
        for combo in combinations(range(n), size):
            mask = 0
            for k in combo:
                mask |= (<long long>1) << k
            bits = list(combo)
            i0 = bits[0]
            total = 0
            for pos in range(1, size):
                j = bits[pos]
                aij = (<list>rows[i0])[j]
                if aij == 0:
                    continue
                sub = layer[mask & ~((<long long>1) << i0) & ~((<long long>1) << j)]
                if sub == 0:
                    continue
                if pos % 2 == 1:
                    total = total + aij * sub
                else:
                    total = total - aij * sub
            nxt[mask] = total
        table.update(nxt)
        layer = nxt
    return table
