"""Step-2 Carnot groups in exponential coordinates.

The group law is the (exact, truncated) BCH product x * y = x + y + [x, y]/2.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from carnotcert.liealg import AlgebraError, GradedLieAlgebra, require_step2
from carnotcert.ratlin import DimensionError, format_vec, parse_vec, to_rat, unit_vec, vec, zero_vec

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class GroupElement:
    algebra: GradedLieAlgebra
    coords: tuple

    def __post_init__(self):
        require_step2(self.algebra)
        object.__setattr__(self, "coords", vec(self.coords))
        if len(self.coords) != self.algebra.dim:
            raise DimensionError("group element has %d coordinates, expected %d" % (len(self.coords), self.algebra.dim))

    @classmethod
    def identity(cls, g: GradedLieAlgebra) -> "GroupElement":
        return cls(g, zero_vec(g.dim))

    @classmethod
    def from_layers(cls, g: GradedLieAlgebra, v1: Sequence, v2: Sequence) -> "GroupElement":
        return cls(g, vec(v1) + vec(v2))

    @property
    def v1(self) -> tuple:
        return self.coords[: self.algebra.layer_dims[0]]

    @property
    def v2(self) -> tuple:
        return self.coords[self.algebra.layer_dims[0] :]

    def is_identity(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return mul(self, other)

    def inverse(self) -> "GroupElement":
        return GroupElement(self.algebra, tuple(-c for c in self.coords))

    def to_json(self) -> dict:
        return {"v1": format_vec(self.v1), "v2": format_vec(self.v2)}

    @classmethod
    def from_json(cls, g: GradedLieAlgebra, data: dict) -> "GroupElement":
        return cls.from_layers(g, parse_vec(data["v1"]), parse_vec(data["v2"]))


def _same(x: GroupElement, y: GroupElement):
    if x.algebra is not y.algebra and x.algebra != y.algebra:
        raise AlgebraError("group elements live in different groups")


def mul(x: GroupElement, y: GroupElement) -> GroupElement:
    _same(x, y)
    g = x.algebra
    k = g.layer_dims[0]
    br = g.v1_bracket(x.coords[:k], y.coords[:k])
    v1 = tuple(a + b for a, b in zip(x.coords[:k], y.coords[:k]))
    v2 = tuple(a + b + HALF * c for a, b, c in zip(x.coords[k:], y.coords[k:], br))
    return GroupElement(g, v1 + v2)


def inverse(x: GroupElement) -> GroupElement:
    return x.inverse()


def commutator(x: GroupElement, y: GroupElement) -> GroupElement:
    """x * y * x^-1 * y^-1, which in step 2 is exp([x1, y1])."""
    return mul(mul(mul(x, y), x.inverse()), y.inverse())


def dilate(r, x: GroupElement) -> GroupElement:
    r = to_rat(r)
    if r < 0:
        raise ValueError("dilations are defined for r >= 0, got %s" % r)
    k = x.algebra.layer_dims[0]
    r2 = r * r
    return GroupElement(x.algebra, tuple(r * c for c in x.coords[:k]) + tuple(r2 * c for c in x.coords[k:]))


def basis_element(g: GradedLieAlgebra, idx: int) -> GroupElement:
    return GroupElement(g, unit_vec(g.dim, idx))


@dataclass(frozen=True)
class Word:
    """A word in the generators exp(e_i); letters are (basis index, +1 or -1).

    Generators normally come from V1. Second-layer basis elements are also
    accepted as central letters so relators can name commutators directly.
    """

    letters: tuple

    def __post_init__(self):
        letters = tuple((int(i), int(e)) for i, e in self.letters)
        for _, e in letters:
            if e not in (1, -1):
                raise ValueError("word exponents must be +1 or -1, got %d" % e)
        object.__setattr__(self, "letters", letters)

    def __len__(self):
        return len(self.letters)

    def __add__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple((i, -e) for i, e in reversed(self.letters)))

    def is_freely_reduced(self) -> bool:
        return all(not (a == c and b == -d) for (a, b), (c, d) in zip(self.letters, self.letters[1:]))

    def to_json(self, g: GradedLieAlgebra) -> dict:
        return {"algebra": g.spec_hash(), "letters": [[g.labels[i], e] for i, e in self.letters]}

    @classmethod
    def from_json(cls, g: GradedLieAlgebra, data: dict) -> "Word":
        letters = []
        for item in data["letters"]:
            lab, e = item
            idx = g.index(lab) if isinstance(lab, str) else int(lab)
            letters.append((idx, e))
        return cls(tuple(letters))


def word_eval(g: GradedLieAlgebra, w: Word) -> GroupElement:
    require_step2(g)
    out = GroupElement.identity(g)
    for idx, e in w.letters:
        if not 0 <= idx < g.dim:
            raise IndexError("generator index %d out of range for dimension %d" % (idx, g.dim))
        gen = basis_element(g, idx)
        out = mul(out, gen if e > 0 else gen.inverse())
    return out


def random_reduced_word(n_generators: int, length: int, rng: random.Random) -> Word:
    letters = []
    while len(letters) < length:
        cand = (rng.randrange(n_generators), rng.choice((1, -1)))
        if letters and letters[-1][0] == cand[0] and letters[-1][1] == -cand[1]:
            continue
        letters.append(cand)
    return Word(tuple(letters))


def copy_embedding(h: GradedLieAlgebra, gU: GradedLieAlgebra, copy: int, x: GroupElement) -> GroupElement:
    """Image of x in G_U under the inclusion of the given copy into the central product."""
    k = gU.layer_dims[0]
    m, rem = divmod(h.layer_dims[0], k)
    if rem or h.layer_dims[1] != gU.layer_dims[1]:
        raise DimensionError("h is not a central product of copies of gU")
    if not 0 <= copy < m:
        raise IndexError("copy %d out of range for %d copies" % (copy, m))
    v1 = [Fraction(0)] * (m * k)
    v1[copy * k : (copy + 1) * k] = x.v1
    return GroupElement.from_layers(h, v1, x.v2)
