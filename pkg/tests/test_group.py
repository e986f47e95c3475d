import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carnotcert.cdh import heisenberg_algebra
from carnotcert.group import (
    GroupElement,
    Word,
    basis_element,
    commutator,
    copy_embedding,
    dilate,
    mul,
    random_reduced_word,
    word_eval,
)
from carnotcert.liealg import AlgebraError, GradedLieAlgebra, central_product_algebra, free_step2, quotient_step2
from carnotcert.ratlin import Subspace, vadd, vscale

from conftest import rand_vec

rats = st.fractions(min_value=-10, max_value=10, max_denominator=7)


def elem(g, rng):
    return GroupElement(g, rand_vec(rng, g.dim))


def test_mul_examples():
    g = free_step2(2)
    e1, e2 = basis_element(g, 0), basis_element(g, 1)
    assert mul(e1, GroupElement.identity(g)) == e1
    assert mul(e1, e2).coords == (1, 1, Fraction(1, 2))
    x = GroupElement(g, (3, -2, 5))
    assert mul(x, x.inverse()).is_identity()


def test_mul_rejects_other_steps():
    g3 = GradedLieAlgebra((2, 1, 2), list("xyzab"), {(0, 1): {2: 1}, (0, 2): {3: 1}, (1, 2): {4: 1}})
    with pytest.raises(AlgebraError):
        GroupElement(g3, (0,) * 5)
    with pytest.raises(AlgebraError):
        mul(GroupElement.identity(free_step2(2)), GroupElement.identity(free_step2(3)))


def test_commutator_examples():
    g2 = free_step2(2)
    # x y x^-1 y^-1 expanded as a direct chain of products
    e1, e2 = basis_element(g2, 0), basis_element(g2, 1)
    chain = mul(mul(mul(e1, e2), e1.inverse()), e2.inverse())
    assert chain.coords == (0, 0, 1)
    assert commutator(e1, e2) == chain
    x = GroupElement(g2, (Fraction(2, 3), 7, 1))
    assert commutator(x, x).is_identity()
    g3 = free_step2(3)
    assert commutator(basis_element(g3, 0), basis_element(g3, 2)) == basis_element(g3, g3.index("e_{1,3}"))


def test_commutator_is_exp_of_bracket(rng):
    for g in (free_step2(4), heisenberg_algebra(3)):
        for _ in range(50):
            x, y = elem(g, rng), elem(g, rng)
            c = commutator(x, y)
            assert c.v1 == (0,) * g.layer_dims[0]
            assert c.v2 == g.v1_bracket(x.v1, y.v1)


def test_dilate_examples():
    g = free_step2(2)
    x = GroupElement(g, (1, 0, 1))
    assert dilate(1, x) == x
    assert dilate(2, x).coords == (2, 0, 4)
    assert dilate(0, x).is_identity()
    with pytest.raises(ValueError):
        dilate(-1, x)


@pytest.mark.parametrize("k", [2, 4, 6])
def test_associativity_closed_form(k, rng):
    g = free_step2(k)
    for _ in range(200):
        x, y, z = elem(g, rng), elem(g, rng), elem(g, rng)
        left = mul(mul(x, y), z)
        assert left == mul(x, mul(y, z))
        br = vadd(vadd(g.v1_bracket(x.v1, y.v1), g.v1_bracket(x.v1, z.v1)), g.v1_bracket(y.v1, z.v1))
        expect = vadd(vadd(vadd(x.coords, y.coords), z.coords), (0,) * k + vscale(Fraction(1, 2), br))
        assert left.coords == expect


@given(r=rats.filter(lambda r: r >= 0), s=rats.filter(lambda r: r >= 0), data=st.data())
@settings(max_examples=100, deadline=None)
def test_dilation_is_homomorphism(r, s, data):
    g = free_step2(3)
    x = GroupElement(g, data.draw(st.tuples(*[rats] * 6)))
    y = GroupElement(g, data.draw(st.tuples(*[rats] * 6)))
    assert dilate(r, mul(x, y)) == mul(dilate(r, x), dilate(r, y))
    assert dilate(r, dilate(s, x)) == dilate(r * s, x)


def test_word_examples():
    g = free_step2(2)
    assert word_eval(g, Word(())).is_identity()
    w = Word(((0, 1), (1, 1), (0, -1), (1, -1)))
    x = word_eval(g, w)
    assert x.coords == (0, 0, 1)
    z = g.index("e_{1,2}")
    assert word_eval(g, w + Word(((z, -1),))).is_identity()
    with pytest.raises(IndexError):
        word_eval(g, Word(((7, 1),)))
    with pytest.raises(ValueError):
        Word(((0, 2),))


def test_word_inverse_round_trip():
    rng = random.Random(8)
    g = free_step2(3)
    for _ in range(100):
        w = random_reduced_word(3, rng.randint(0, 30), rng)
        assert w.is_freely_reduced()
        assert word_eval(g, w + w.inverse()).is_identity()
        assert mul(word_eval(g, w), word_eval(g, w.inverse())).is_identity()


def test_word_json_uses_labels():
    g = free_step2(2)
    w = Word(((0, 1), (1, -1)))
    data = w.to_json(g)
    assert data["letters"] == [["e_1", 1], ["e_2", -1]]
    assert Word.from_json(g, data) == w


def test_copy_embedding_is_homomorphism(rng):
    F = free_step2(4)
    gU, _ = quotient_step2(F, Subspace.span([rand_vec(rng, 6)], 6))
    h = central_product_algebra(gU, 3)
    for _ in range(30):
        x, y = elem(gU, rng), elem(gU, rng)
        for c in range(3):
            assert copy_embedding(h, gU, c, mul(x, y)) == mul(copy_embedding(h, gU, c, x), copy_embedding(h, gU, c, y))
        # commutators from different copies coincide in the shared center
        c0 = commutator(copy_embedding(h, gU, 0, x), copy_embedding(h, gU, 0, y))
        c2 = commutator(copy_embedding(h, gU, 2, x), copy_embedding(h, gU, 2, y))
        assert c0 == c2
        assert commutator(copy_embedding(h, gU, 0, x), copy_embedding(h, gU, 1, y)).is_identity()
