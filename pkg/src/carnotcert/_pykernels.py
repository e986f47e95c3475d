"""Pure-Python implementations of the hot kernels.

These mirror ``_ckernels.pyx`` function for function and are used whenever
the compiled extension is unavailable.
"""


def rank_int(rows):
    """Rank of an integer matrix by Bareiss fraction-free elimination.

    ``rows`` is a list of lists of Python ints; it is copied, not mutated.
    """
    a = [list(r) for r in rows]
    nrows = len(a)
    if nrows == 0:
        return 0
    ncols = len(a[0])
    rank = 0
    prev = 1
    for col in range(ncols):
        if rank == nrows:
            break
        piv = -1
        for r in range(rank, nrows):
            if a[r][col] != 0:
                piv = r
                break
        if piv < 0:
            continue
        if piv != rank:
            a[piv], a[rank] = a[rank], a[piv]
        prow = a[rank]
        p = prow[col]
        for r in range(rank + 1, nrows):
            row = a[r]
            f = row[col]
            for c in range(col + 1, ncols):
                row[c] = (p * row[c] - f * prow[c]) // prev
            row[col] = 0
        prev = p
        rank += 1
    return rank


def step2_bracket(x, y, table, out_dim):
    """Bilinear step-2 bracket of two first-layer vectors.

    ``table`` holds ``(a, b, terms)`` for a < b with ``terms`` a list of
    ``(out_index, coefficient)``; the mirrored pair is implied.
    """
    out = [0] * out_dim
    for a, b, terms in table:
        s = x[a] * y[b] - x[b] * y[a]
        if s:
            for i, c in terms:
                out[i] += s * c
    return out


def pfaffian_table(A, max_size):
    """Principal Pfaffians of a skew matrix for all index sets up to ``max_size``.

    Returns a dict mapping a bitmask of indices to the Pfaffian of the
    corresponding principal submatrix (the empty set maps to 1). Only sets of
    even size are present. Uses expansion along the lowest index:
    ``pf(S) = sum_j (-1)^(pos(j)-1) a[i0][j] pf(S - {i0, j})``.
    """
    n = len(A)
    table = {0: 1}
    layer = {0: 1}
    size = 0
    while size + 2 <= max_size and size + 2 <= n:
        size += 2
        nxt = {}
        # build sets of the new size by prepending a pair below the current min
        for mask in _subsets(n, size):
            bits = [i for i in range(n) if mask >> i & 1]
            i0 = bits[0]
            total = 0
            for pos in range(1, size):
                j = bits[pos]
                aij = A[i0][j]
                if aij == 0:
                    continue
                sub = layer[mask & ~(1 << i0) & ~(1 << j)]
                if sub == 0:
                    continue
                if pos % 2 == 1:
                    total += aij * sub
                else:
                    total -= aij * sub
            nxt[mask] = total
        table.update(nxt)
        layer = nxt
    return table


def _subsets(n, size):
    from itertools import combinations

    for combo in combinations(range(n), size):
        mask = 0
        for i in combo:
            mask |= 1 << i
        yield mask
