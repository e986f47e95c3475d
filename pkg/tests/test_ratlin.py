import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carnotcert.ratlin import (
    DimensionError,
    LinearFunctional,
    NotAntisymmetric,
    QuotientMap,
    RatMatrix,
    Subspace,
    format_rat,
    nullspace,
    rank,
    reassemble,
    rref,
    skew_decompose,
    subspace_contains,
    to_rat,
    wedge,
)

from conftest import rand_vec

rats = st.fractions(min_value=-20, max_value=20, max_denominator=6)


def block_skew(blocks):
    n = 2 * blocks
    rows = [[0] * n for _ in range(n)]
    for b in range(blocks):
        rows[2 * b][2 * b + 1] = 1
        rows[2 * b + 1][2 * b] = -1
    return RatMatrix(rows)


def test_rank_examples():
    assert rank(RatMatrix.identity(3)) == 3
    assert rank(RatMatrix.zeros(5, 5)) == 0
    A = block_skew(3)
    # Gauss-Jordan oracle, independent of the fraction-free kernel
    assert len(rref(A.rows, 6)[0]) == 6
    assert rank(A) == 6


def test_rational_formatting():
    assert format_rat(Fraction(3, 1)) == "3"
    assert format_rat(Fraction(-2, 4)) == "-1/2"
    assert to_rat("-7/14") == Fraction(-1, 2)
    with pytest.raises(TypeError):
        to_rat(0.5)


def test_subspace_contains_examples():
    S = Subspace.span([(1, 0)], 2)
    assert subspace_contains(S, (2, 0))
    assert not subspace_contains(S, (0, 1))
    T = Subspace.span([(1, 2), (0, 1)], 2)
    assert T == Subspace.full(2)
    assert subspace_contains(T, (7, -3))
    with pytest.raises(DimensionError):
        subspace_contains(S, (1, 0, 0))


def test_skew_decompose_examples():
    A = wedge((1, 0), (0, 1))
    pairs = skew_decompose(A)
    assert pairs == [((1, 0), (0, 1))]
    assert skew_decompose(RatMatrix.zeros(4, 4)) == []
    with pytest.raises(NotAntisymmetric):
        skew_decompose(RatMatrix([[1, 0], [0, 0]]))


def test_skew_decompose_plant_and_recover(rng):
    for _ in range(200):
        n = rng.randint(4, 8)
        u1, w1, u2, w2 = (rand_vec(rng, n) for _ in range(4))
        A = wedge(u1, w1) + wedge(u2, w2)
        pairs = skew_decompose(A)
        assert len(pairs) == rank(A) // 2
        assert reassemble(pairs, n) == A
        if rank(RatMatrix([u1, w1, u2, w2])) == 4:
            assert len(pairs) == 2


def test_rank_invariant_under_permutation_and_scaling(rng):
    for _ in range(100):
        n, m = rng.randint(1, 6), rng.randint(1, 6)
        rows = [list(rand_vec(rng, m)) for _ in range(n)]
        r = rank(rows)
        perm_rows = rows[:]
        rng.shuffle(perm_rows)
        cols = list(range(m))
        rng.shuffle(cols)
        permuted = [[row[c] for c in cols] for row in perm_rows]
        scaled = [[x * Fraction(rng.choice([1, -2, 3]), rng.randint(1, 4)) for x in row] for row in rows]
        assert rank(permuted) == r
        assert rank(scaled) == r


@given(st.integers(1, 7).flatmap(lambda n: st.lists(st.tuples(*[rats] * n), min_size=1, max_size=3).map(lambda ps: (n, ps))))
@settings(max_examples=100, deadline=None)
def test_skew_rank_even_and_reassembly(data):
    n, vecs = data
    # build a skew matrix from the entries directly
    A = [[Fraction(0)] * n for _ in range(n)]
    flat = [x for v in vecs for x in v]
    it = iter(flat * n)
    for i in range(n):
        for j in range(i + 1, n):
            x = next(it)
            A[i][j], A[j][i] = x, -x
    M = RatMatrix(A)
    r = rank(M)
    assert r % 2 == 0
    pairs = skew_decompose(M)
    assert len(pairs) == r // 2
    assert reassemble(pairs, n) == M


def test_canonical_echelon_form(rng):
    for _ in range(50):
        n = rng.randint(2, 6)
        basis = [rand_vec(rng, n) for _ in range(rng.randint(1, n))]
        mix = []
        for _ in range(len(basis) + 1):
            coeffs = [Fraction(rng.randint(-3, 3)) for _ in basis]
            mix.append(tuple(sum((c * b[i] for c, b in zip(coeffs, basis)), Fraction(0)) for i in range(n)))
        S1 = Subspace.span(basis, n)
        S2 = Subspace.span(mix + basis[::-1], n)
        assert S1.basis == S2.basis
        for row, p in zip(S1.basis, S1.pivots):
            assert row[p] == 1
            assert all(x == 0 for x in row[:p])


def test_quotient_map_kills_kernel(rng):
    for _ in range(50):
        n = rng.randint(2, 7)
        K = Subspace.span([rand_vec(rng, n) for _ in range(rng.randint(0, n - 1))], n)
        P = QuotientMap(K)
        assert P.target_dim == n - K.dim
        for b in K.basis:
            assert all(x == 0 for x in P(b))
        v = rand_vec(rng, n)
        coeffs = [Fraction(rng.randint(-3, 3)) for _ in K.basis]
        u = tuple(sum((c * b[i] for c, b in zip(coeffs, K.basis)), Fraction(0)) for i in range(n))
        assert P(tuple(a + b for a, b in zip(v, u))) == P(v)
        assert P.matrix.apply(v) == P(v)
        R = P.representative_projection
        assert R @ R == R
        assert P(P.lift(P(v))) == P(v)


def test_nullspace_and_functional():
    M = RatMatrix([[1, 2, 3], [2, 4, 6]])
    ns = nullspace(M)
    assert len(ns) == 2
    for x in ns:
        assert all(c == 0 for c in M.apply(x))
    K = Subspace.span([(1, 1, 0)], 3)
    P = QuotientMap(K)
    Q = LinearFunctional((1, 5))
    Qp = Q.compose(P)
    for v in [(1, 2, 3), (0, 0, 1), (1, 1, 0)]:
        assert Qp(v) == Q(P(v))
    assert Qp((1, 1, 0)) == 0
