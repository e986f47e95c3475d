"""Cayley-Dickson doubling R -> C -> H -> O and the Heisenberg-type algebras K_i + Im(K_i).

Conventions are exactly those of the doubling rules
    (a, b)(c, d) = (ac - d b*, a* d + c b),  (a, b)* = (a*, -b),  Im(a, b) = (Im a, b),
with Im = 0 and a* = a on the reals. A level-i number is a flat tuple of 2^i
rationals whose first half is ``a`` and second half is ``b``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from carnotcert.liealg import AlgebraError, GradedLieAlgebra
from carnotcert.ratlin import format_vec, parse_vec, rank, unit_vec, vec

MAX_LEVEL = 3


@dataclass(frozen=True)
class CDNumber:
    level: int
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", vec(self.coords))
        if not 0 <= self.level <= MAX_LEVEL:
            raise ValueError("level must be in 0..%d" % MAX_LEVEL)
        if len(self.coords) != 2**self.level:
            raise ValueError("level %d numbers have %d coordinates, got %d" % (self.level, 2**self.level, len(self.coords)))

    def __mul__(self, other):
        return cd_mul(self, other)

    def __add__(self, other):
        _same_level(self, other)
        return CDNumber(self.level, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return CDNumber(self.level, tuple(-a for a in self.coords))

    def norm2(self) -> Fraction:
        return sum((x * x for x in self.coords), Fraction(0))

    def to_json(self) -> dict:
        return {"level": self.level, "coords": format_vec(self.coords)}

    @classmethod
    def from_json(cls, data: dict) -> "CDNumber":
        return cls(int(data["level"]), parse_vec(data["coords"]))


def _same_level(x, y):
    if x.level != y.level:
        raise ValueError("level mismatch: %d vs %d" % (x.level, y.level))


def _mul(x: tuple, y: tuple) -> tuple:
    if len(x) == 1:
        return (x[0] * y[0],)
    h = len(x) // 2
    a, b, c, d = x[:h], x[h:], y[:h], y[h:]
    left = _sub(_mul(a, c), _mul(d, _conj(b)))
    right = _add(_mul(_conj(a), d), _mul(c, b))
    return left + right


def _conj(x: tuple) -> tuple:
    if len(x) == 1:
        return x
    h = len(x) // 2
    return _conj(x[:h]) + tuple(-t for t in x[h:])


def _im(x: tuple) -> tuple:
    if len(x) == 1:
        return (Fraction(0),)
    h = len(x) // 2
    return _im(x[:h]) + x[h:]


def _add(x, y):
    return tuple(a + b for a, b in zip(x, y))


def _sub(x, y):
    return tuple(a - b for a, b in zip(x, y))


def cd_mul(x: CDNumber, y: CDNumber) -> CDNumber:
    _same_level(x, y)
    return CDNumber(x.level, _mul(x.coords, y.coords))


def cd_conj(x: CDNumber) -> CDNumber:
    return CDNumber(x.level, _conj(x.coords))


def cd_im(x: CDNumber) -> CDNumber:
    return CDNumber(x.level, _im(x.coords))


def imaginary_bracket(z: CDNumber, w: CDNumber) -> CDNumber:
    """Im(z w*)."""
    return cd_im(cd_mul(z, cd_conj(w)))


def bracket_degenerate(z: CDNumber, w: CDNumber) -> bool:
    _same_level(z, w)
    return all(c == 0 for c in imaginary_bracket(z, w).coords)


def collinear(z: CDNumber, w: CDNumber) -> bool:
    _same_level(z, w)
    return rank([z.coords, w.coords]) <= 1


def heisenberg_algebra(level: int) -> GradedLieAlgebra:
    """g_i = K_i + L_i with [z, w] = Im(z w*); L_i is coordinates 1..2^i - 1 of K_i."""
    if level == 0:
        raise AlgebraError("level 0 gives an abelian algebra with no second layer")
    if not 1 <= level <= MAX_LEVEL:
        raise AlgebraError("level must be 1, 2 or 3, got %d" % level)
    n = 2**level
    labels = ["k_%d" % i for i in range(n)] + ["l_%d" % i for i in range(1, n)]
    table = {}
    for a in range(n):
        for b in range(a + 1, n):
            im = imaginary_bracket(CDNumber(level, unit_vec(n, a)), CDNumber(level, unit_vec(n, b))).coords
            assert im[0] == 0
            terms = {n + i - 1: x for i, x in enumerate(im) if i > 0 and x != 0}
            if terms:
                table[(a, b)] = terms
    return GradedLieAlgebra((n, n - 1), labels, table)
