"""Graded nilpotent Lie algebras given by structure constants.

Basis elements are indexed globally, layer by layer. The bracket table maps
ordered basis pairs to sparse coefficient dicts; constructors only populate
pairs ``a < b`` and the mirrored entry is implied. Tables loaded from JSON
may carry both orders, which :func:`validate` then cross-checks.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import Optional, Sequence

from carnotcert import _backend
from carnotcert.ratlin import (
    DimensionError,
    QuotientMap,
    RatMatrix,
    Subspace,
    format_rat,
    nullspace,
    rref,
    to_rat,
    unit_vec,
    vec,
    zero_vec,
)


class AlgebraError(ValueError):
    pass


@dataclass(frozen=True)
class Presentation:
    """An algebra written as F(k) / U.

    ``projection`` maps V2 of the free algebra onto V2 of the presented
    algebra and has kernel ``U``.
    """

    free: "GradedLieAlgebra"
    U: Subspace
    projection: RatMatrix


@dataclass(frozen=True, eq=False)
class GradedLieAlgebra:
    layer_dims: tuple
    labels: tuple
    table: dict  # (a, b) -> {c: Fraction}
    presentation: Optional[Presentation] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "layer_dims", tuple(int(d) for d in self.layer_dims))
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.labels) != self.dim:
            raise AlgebraError("%d labels for an algebra of dimension %d" % (len(self.labels), self.dim))
        if len(set(self.labels)) != len(self.labels):
            raise AlgebraError("duplicate basis labels")
        clean = {}
        for (a, b), out in self.table.items():
            if not (0 <= a < self.dim and 0 <= b < self.dim):
                raise AlgebraError("bracket index out of range: (%d, %d)" % (a, b))
            terms = {int(c): to_rat(x) for c, x in out.items() if to_rat(x) != 0}
            for c in terms:
                if not 0 <= c < self.dim:
                    raise AlgebraError("bracket output index out of range: %d" % c)
            if terms:
                clean[(int(a), int(b))] = terms
        object.__setattr__(self, "table", clean)
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(self.labels)})

    # structure

    @property
    def step(self) -> int:
        return len(self.layer_dims)

    @property
    def dim(self) -> int:
        return sum(self.layer_dims)

    def layer_offset(self, i: int) -> int:
        """Global index of the first basis element of layer i (1-based)."""
        return sum(self.layer_dims[: i - 1])

    def layer_range(self, i: int) -> range:
        off = self.layer_offset(i)
        return range(off, off + self.layer_dims[i - 1])

    def degree(self, idx: int) -> int:
        off = 0
        for d, n in enumerate(self.layer_dims, start=1):
            if idx < off + n:
                return d
            off += n
        raise IndexError(idx)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise AlgebraError("unknown basis label %r" % (label,)) from None

    def basis_bracket(self, a: int, b: int) -> dict:
        if (a, b) in self.table:
            return self.table[(a, b)]
        if (b, a) in self.table:
            return {c: -x for c, x in self.table[(b, a)].items()}
        return {}

    def bracket_coords(self, x: Sequence, y: Sequence) -> tuple:
        n = self.dim
        if len(x) != n or len(y) != n:
            raise DimensionError("element length does not match algebra dimension %d" % n)
        if self.step == 2:
            k = self.layer_dims[0]
            return (Fraction(0),) * k + self._int_bracket(vec(x[:k]), vec(y[:k]))
        out = [Fraction(0)] * n
        nzx = [i for i in range(n) if x[i] != 0]
        nzy = [i for i in range(n) if y[i] != 0]
        for a in nzx:
            for b in nzy:
                for c, s in self.basis_bracket(a, b).items():
                    out[c] += x[a] * y[b] * s
        return tuple(out)

    @property
    def v1_table(self) -> list:
        """Step-2 kernel table: (a, b, [(out index within V2, coeff)]) for a < b in V1."""
        cached = self.__dict__.get("_v1_table")
        if cached is not None:
            return cached
        k = self.layer_dims[0]
        off = k
        tab = []
        for a in range(k):
            for b in range(a + 1, k):
                out = self.basis_bracket(a, b)
                terms = [(c - off, s) for c, s in sorted(out.items()) if off <= c < self.dim]
                if terms:
                    tab.append((a, b, terms))
        object.__setattr__(self, "_v1_table", tab)
        return tab

    @property
    def v1_int_table(self) -> tuple:
        """``(table, d)``: the step-2 kernel table scaled to integers by the common denominator d."""
        cached = self.__dict__.get("_v1_int_table")
        if cached is not None:
            return cached
        d = 1
        for _, _, terms in self.v1_table:
            for _, s in terms:
                d = lcm(d, s.denominator)
        tab = [(a, b, [(c, int(s * d)) for c, s in terms]) for a, b, terms in self.v1_table]
        object.__setattr__(self, "_v1_int_table", (tab, d))
        return tab, d

    def v1_bracket(self, x1: Sequence, y1: Sequence) -> tuple:
        """Bracket of two V1 vectors as a V2 vector (step 2 only)."""
        require_step2(self)
        k = self.layer_dims[0]
        if len(x1) != k or len(y1) != k:
            raise DimensionError("first-layer vectors must have length %d" % k)
        return self._int_bracket(x1, y1)

    def _int_bracket(self, x1, y1) -> tuple:
        tab, d = self.v1_int_table
        xi, dx = _integerize(x1)
        yi, dy = _integerize(y1)
        out = _backend.step2_bracket(xi, yi, tab, self.layer_dims[1])
        den = d * dx * dy
        return tuple(Fraction(c, den) for c in out)

    # elements

    def element(self, coords) -> "AlgebraElement":
        return AlgebraElement(self, vec(coords))

    def basis(self, label) -> "AlgebraElement":
        idx = self.index(label) if isinstance(label, str) else int(label)
        return AlgebraElement(self, unit_vec(self.dim, idx))

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, zero_vec(self.dim))

    # serialization

    def to_json(self) -> dict:
        brackets = []
        for (a, b) in sorted(self.table):
            out = self.table[(a, b)]
            brackets.append(
                {
                    "a": self.labels[a],
                    "b": self.labels[b],
                    "out": {self.labels[c]: format_rat(out[c]) for c in sorted(out)},
                }
            )
        return {
            "step": self.step,
            "layer_dims": list(self.layer_dims),
            "brackets": brackets,
            "labels": list(self.labels),
        }

    @classmethod
    def from_json(cls, data: dict) -> "GradedLieAlgebra":
        layer_dims = tuple(int(d) for d in data["layer_dims"])
        if "step" in data and int(data["step"]) != len(layer_dims):
            raise AlgebraError("step %s disagrees with %d layers" % (data["step"], len(layer_dims)))
        labels = tuple(data["labels"])
        index = {lab: i for i, lab in enumerate(labels)}
        table: dict = {}
        try:
            for entry in data.get("brackets", []):
                a, b = index[entry["a"]], index[entry["b"]]
                out = {index[lab]: to_rat(x) for lab, x in entry["out"].items()}
                if (a, b) in table:
                    raise AlgebraError("duplicate bracket entry for (%s, %s)" % (entry["a"], entry["b"]))
                table[(a, b)] = out
        except KeyError as exc:
            raise AlgebraError("unknown label %s in bracket table" % exc) from None
        return cls(layer_dims, labels, table)

    def spec_hash(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def same_structure(self, other: "GradedLieAlgebra") -> bool:
        return (
            self.layer_dims == other.layer_dims
            and all(
                self.basis_bracket(a, b) == other.basis_bracket(a, b)
                for a in range(self.dim)
                for b in range(a + 1, self.dim)
            )
        )

    def __eq__(self, other):
        if not isinstance(other, GradedLieAlgebra):
            return NotImplemented
        return self.labels == other.labels and self.same_structure(other)

    def __hash__(self):
        return hash((self.layer_dims, self.labels))

    def __repr__(self):
        return "GradedLieAlgebra(layer_dims=%s)" % (self.layer_dims,)


@dataclass(frozen=True)
class AlgebraElement:
    algebra: GradedLieAlgebra
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", vec(self.coords))
        if len(self.coords) != self.algebra.dim:
            raise DimensionError("element has %d coordinates, algebra has dimension %d" % (len(self.coords), self.algebra.dim))

    def layer(self, i: int) -> tuple:
        r = self.algebra.layer_range(i)
        return self.coords[r.start : r.stop]

    def _check(self, other):
        if other.algebra is not self.algebra and other.algebra != self.algebra:
            raise AlgebraError("elements belong to different algebras")

    def __add__(self, other):
        self._check(other)
        return AlgebraElement(self.algebra, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement(self.algebra, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return AlgebraElement(self.algebra, tuple(-a for a in self.coords))

    def __rmul__(self, r):
        r = to_rat(r)
        return AlgebraElement(self.algebra, tuple(r * a for a in self.coords))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)


def _integerize(v) -> tuple:
    d = 1
    for x in v:
        d = lcm(d, x.denominator)
    return [x.numerator * (d // x.denominator) for x in v], d


def bracket(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    x._check(y)
    return AlgebraElement(x.algebra, x.algebra.bracket_coords(x.coords, y.coords))


def require_step2(g: GradedLieAlgebra):
    if g.step != 2:
        raise AlgebraError("operation requires a step-2 algebra, got step %d" % g.step)


# constructors


def pair_index(i: int, j: int, k: int) -> int:
    """Position of e_{i,j} (0-based i < j) in the lexicographic V2 basis of F(k)."""
    return i * k - i * (i + 1) // 2 + (j - i - 1)


def free_step2(k: int) -> GradedLieAlgebra:
    if k < 2:
        raise AlgebraError("free step-2 algebra needs k >= 2, got %d" % k)
    labels = ["e_%d" % (i + 1) for i in range(k)]
    labels += ["e_{%d,%d}" % (i + 1, j + 1) for i, j in combinations(range(k), 2)]
    table = {(i, j): {k + pair_index(i, j, k): Fraction(1)} for i, j in combinations(range(k), 2)}
    g = GradedLieAlgebra((k, k * (k - 1) // 2), labels, table)
    return g


def is_free_step2(g: GradedLieAlgebra) -> bool:
    if g.step != 2:
        return False
    k, n2 = g.layer_dims
    if k < 2 or n2 != k * (k - 1) // 2:
        return False
    for a in range(g.dim):
        for b in range(a, g.dim):
            expect = {}
            if a < b < k:
                expect = {k + pair_index(a, b, k): Fraction(1)}
            if g.basis_bracket(a, b) != expect:
                return False
            if (b, a) in g.table and g.table[(b, a)] != {c: -x for c, x in expect.items()}:
                return False
    return True


def free_rank(g: GradedLieAlgebra) -> int:
    if not is_free_step2(g):
        raise AlgebraError("algebra is not a free step-2 algebra in standard basis")
    return g.layer_dims[0]


def quotient_step2(g: GradedLieAlgebra, U: Subspace) -> tuple:
    """The algebra g / U for U inside V2, with the projection V2 -> V2/U."""
    require_step2(g)
    k, n2 = g.layer_dims
    if U.ambient_dim != n2:
        raise AlgebraError("U must be a subspace of V2 (dimension %d), got ambient %d" % (n2, U.ambient_dim))
    P = QuotientMap(U)
    comp = U.complement_indices()
    labels = list(g.labels[:k]) + ["[%s]" % g.labels[k + c] for c in comp]
    table = {}
    for a in range(k):
        for b in range(a + 1, k):
            out = g.basis_bracket(a, b)
            v2 = [Fraction(0)] * n2
            for c, s in out.items():
                v2[c - k] = s
            w = P(v2)
            terms = {k + i: x for i, x in enumerate(w) if x != 0}
            if terms:
                table[(a, b)] = terms
    presentation = None
    if is_free_step2(g):
        presentation = Presentation(g, U, P.matrix)
    elif g.presentation is not None:
        base = g.presentation
        # pull U back through the existing projection
        lifted = [solve_lift(base.projection, u) for u in U.basis]
        total = Subspace(base.U.ambient_dim, base.U.basis + tuple(lifted))
        presentation = Presentation(base.free, total, _compose(P.matrix, base.projection))
    q = GradedLieAlgebra((k, n2 - U.dim), labels, table, presentation)
    return q, P


def solve_lift(M: RatMatrix, target) -> tuple:
    from carnotcert.ratlin import solve

    x = solve(M, target)
    if x is None:
        raise AlgebraError("vector has no preimage under projection")
    return x


def _compose(A: RatMatrix, B: RatMatrix) -> RatMatrix:
    return A @ B


def bracket_map(g: GradedLieAlgebra) -> RatMatrix:
    """Linear map V2(F(k)) -> V2(g), e_{i,j} -> [e_i, e_j]_g, for step-2 g."""
    require_step2(g)
    k, n2 = g.layer_dims
    cols = []
    for i, j in combinations(range(k), 2):
        cols.append(g.v1_bracket(unit_vec(k, i), unit_vec(k, j)))
    return RatMatrix.from_columns(cols, n2)


def present(g: GradedLieAlgebra) -> Presentation:
    """Recover g as F(k)/U from its structure constants (needs [V1, V1] = V2)."""
    if g.presentation is not None:
        return g.presentation
    require_step2(g)
    k, n2 = g.layer_dims
    if k < 2:
        raise AlgebraError("cannot present an algebra with dim V1 < 2")
    B = bracket_map(g)
    if len(rref(B.rows, B.ncols)[0]) != n2:
        raise AlgebraError("[V1, V1] does not span V2; algebra is not generated by V1")
    U = Subspace.span(nullspace(B), B.ncols)
    return Presentation(free_step2(k), U, B)


def central_product_algebra(gU: GradedLieAlgebra, m: int) -> GradedLieAlgebra:
    """W1 = V1 + ... + V1 (m copies), W2 = V2/U, bracket summed over copies."""
    if m < 1:
        raise AlgebraError("central product needs m >= 1, got %d" % m)
    require_step2(gU)
    pres = present(gU)
    k = pres.free.layer_dims[0]
    n2 = gU.layer_dims[1]
    P = pres.projection
    base_labels = gU.labels[:k]
    if m == 1:
        labels = list(base_labels)
    else:
        labels = ["%s^(%d)" % (lab, c + 1) for c in range(m) for lab in base_labels]
    labels += list(gU.labels[k:])
    off = m * k
    table = {}
    for i, j in combinations(range(k), 2):
        col = P.column(pair_index(i, j, k))
        terms = {off + r: x for r, x in enumerate(col) if x != 0}
        if not terms:
            continue
        for c in range(m):
            table[(c * k + i, c * k + j)] = dict(terms)
    h = GradedLieAlgebra((m * k, n2), labels, table)
    if m == 1:
        object.__setattr__(h, "presentation", pres)
    return h


def direct_sum(g: GradedLieAlgebra, h: GradedLieAlgebra) -> GradedLieAlgebra:
    """Layerwise direct sum; brackets between the summands vanish."""
    if g.step != h.step:
        raise AlgebraError("direct sum needs equal steps")
    dims = tuple(a + b for a, b in zip(g.layer_dims, h.layer_dims))

    def remap(alg, shift_other_before):
        idx = {}
        for layer in range(1, alg.step + 1):
            new_off = sum(dims[: layer - 1]) + (shift_other_before[layer - 1])
            for t, old in enumerate(alg.layer_range(layer)):
                idx[old] = new_off + t
        return idx

    gi = remap(g, [0] * g.step)
    hi = remap(h, list(g.layer_dims))
    labels = [None] * sum(dims)
    for old, new in gi.items():
        labels[new] = "%s|0" % g.labels[old]
    for old, new in hi.items():
        labels[new] = "%s|1" % h.labels[old]
    table = {}
    for alg, mp in ((g, gi), (h, hi)):
        for (a, b), out in alg.table.items():
            table[(mp[a], mp[b])] = {mp[c]: x for c, x in out.items()}
    return GradedLieAlgebra(dims, labels, table)


# validation


@dataclass
class Check:
    name: str
    passed: bool
    details: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"check": self.name, "passed": self.passed, "details": self.details}


@dataclass
class ValidationReport:
    checks: list

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        return {"valid": self.ok, "checks": [c.to_json() for c in self.checks]}


MAX_DETAILS = 20


def validate(g: GradedLieAlgebra) -> ValidationReport:
    checks = [
        _check_antisymmetry(g),
        _check_grading(g),
        _check_jacobi(g),
        _check_generation(g),
    ]
    return ValidationReport(checks)


def _check_antisymmetry(g):
    bad = []
    for (a, b), out in g.table.items():
        if a == b:
            bad.append("[%s, %s] is nonzero" % (g.labels[a], g.labels[a]))
        elif a > b and (b, a) in g.table:
            if g.table[(b, a)] != {c: -x for c, x in out.items()}:
                bad.append("[%s, %s] != -[%s, %s]" % (g.labels[b], g.labels[a], g.labels[a], g.labels[b]))
    return Check("antisymmetry", not bad, bad[:MAX_DETAILS])


def _check_grading(g):
    bad = []
    for (a, b), out in g.table.items():
        target = g.degree(a) + g.degree(b)
        for c in out:
            if target > g.step or g.degree(c) != target:
                bad.append("[%s, %s] has a component on %s outside layer %d" % (g.labels[a], g.labels[b], g.labels[c], target))
                break
    return Check("grading", not bad, bad[:MAX_DETAILS])


def _check_jacobi(g):
    n = g.dim
    bad = []

    def br(a_coeffs, b):
        out = {}
        for a, s in a_coeffs.items():
            for c, t in g.basis_bracket(a, b).items():
                out[c] = out.get(c, 0) + s * t
        return out

    for a, b, c in combinations(range(n), 3):
        total = {}
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            for idx, s in br(g.basis_bracket(x, y), z).items():
                total[idx] = total.get(idx, 0) + s
        if any(v != 0 for v in total.values()):
            bad.append("Jacobi fails on (%s, %s, %s)" % (g.labels[a], g.labels[b], g.labels[c]))
            if len(bad) >= MAX_DETAILS:
                break
    return Check("jacobi", not bad, bad)


def _check_generation(g):
    bad = []
    k = g.layer_dims[0]
    for i in range(1, g.step):
        lower = g.layer_range(i)
        upper = g.layer_range(i + 1)
        vecs = []
        for a in range(k):
            for b in lower:
                out = g.basis_bracket(a, b)
                if out:
                    vecs.append(tuple(out.get(c, Fraction(0)) for c in upper))
        got = Subspace.span(vecs, len(upper)) if vecs else Subspace.zero(len(upper))
        if got.dim != len(upper):
            bad.append("[V1, V%d] has dimension %d, V%d has dimension %d" % (i, got.dim, i + 1, len(upper)))
    return Check("generation", not bad, bad)
