"""Piecewise-linear horizontal curves and the unfillable witness loop.

A PL curve is its vertex list in the first layer. The horizontal lift of the
segment a -> b picks up [a, b]/2 in the second layer, so the lifted area of a
curve is half the sum of brackets of consecutive vertices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from carnotcert.cone import (
    InaccessibilityCertificate,
    check_inaccessible,
    recheck_inaccessibility,
    wedge_rank,
)
from carnotcert.group import GroupElement, mul
from carnotcert.liealg import (
    GradedLieAlgebra,
    central_product_algebra,
    free_step2,
    pair_index,
    quotient_step2,
    require_step2,
)
from carnotcert.ratlin import (
    DimensionError,
    LinearFunctional,
    QuotientMap,
    Subspace,
    format_rat,
    format_vec,
    is_zero,
    parse_vec,
    to_rat,
    unit_vec,
    vadd,
    vec,
    vscale,
    vsub,
    zero_vec,
)

HALF = Fraction(1, 2)


class CertificateError(RuntimeError):
    """A witness certificate invariant failed; ``check`` names it."""

    def __init__(self, check: str, message: str):
        super().__init__("%s: %s" % (check, message))
        self.check = check


@dataclass(frozen=True)
class PLCurve:
    algebra: GradedLieAlgebra
    vertices: tuple

    def __post_init__(self):
        require_step2(self.algebra)
        verts = tuple(vec(p) for p in self.vertices)
        if len(verts) < 2:
            raise ValueError("a PL curve needs at least two vertices")
        k = self.algebra.layer_dims[0]
        for p in verts:
            if len(p) != k:
                raise DimensionError("vertex of length %d in a first layer of dimension %d" % (len(p), k))
        object.__setattr__(self, "vertices", verts)

    @property
    def closed(self) -> bool:
        return self.vertices[0] == self.vertices[-1]

    @property
    def based(self) -> bool:
        return is_zero(self.vertices[0])

    def reversed(self) -> "PLCurve":
        return PLCurve(self.algebra, self.vertices[::-1])

    def scaled(self, r) -> "PLCurve":
        r = to_rat(r)
        return PLCurve(self.algebra, tuple(vscale(r, p) for p in self.vertices))

    def translated_to_origin(self) -> "PLCurve":
        p0 = self.vertices[0]
        return PLCurve(self.algebra, tuple(vsub(p, p0) for p in self.vertices))

    def concat(self, other: "PLCurve") -> "PLCurve":
        """Traverse self, then other translated to start at self's endpoint."""
        shift = vsub(self.vertices[-1], other.vertices[0])
        return PLCurve(self.algebra, self.vertices + tuple(vadd(p, shift) for p in other.vertices[1:]))

    def to_json(self) -> dict:
        return {"algebra": self.algebra.spec_hash(), "vertices": [format_vec(p) for p in self.vertices]}

    @classmethod
    def from_json(cls, g: GradedLieAlgebra, data: dict) -> "PLCurve":
        return cls(g, tuple(parse_vec(p) for p in data["vertices"]))


def lift_area(c: PLCurve) -> tuple:
    g = c.algebra
    total = zero_vec(g.layer_dims[1])
    for a, b in zip(c.vertices, c.vertices[1:]):
        total = vadd(total, g.v1_bracket(a, b))
    return vscale(HALF, total)


def group_lift_endpoint(c: PLCurve) -> GroupElement:
    """Product of the segment increments exp(p_{i+1} - p_i) for a curve based at 0."""
    if not c.based:
        raise ValueError("group_lift_endpoint requires the curve to start at 0; translate it first")
    g = c.algebra
    n2 = g.layer_dims[1]
    out = GroupElement.identity(g)
    for a, b in zip(c.vertices, c.vertices[1:]):
        out = mul(out, GroupElement.from_layers(g, vsub(b, a), zero_vec(n2)))
    return out


def paper_loop(g: GradedLieAlgebra, vs: Sequence[Sequence]) -> PLCurve:
    """Concatenated rectangle circuits 0 -> a -> a+b -> b -> 0 for consecutive pairs (a, b)."""
    if len(vs) == 0 or len(vs) % 2:
        raise ValueError("need an even, nonzero number of first-layer vectors, got %d" % len(vs))
    k = g.layer_dims[0]
    origin = zero_vec(k)
    verts = [origin]
    for a, b in zip(vs[0::2], vs[1::2]):
        a, b = vec(a), vec(b)
        verts += [a, vadd(a, b), b, origin]
    return PLCurve(g, tuple(verts))


def obstruction_value(c: PLCurve, Q: LinearFunctional, Pprime: QuotientMap):
    """int_0^1 Q(P'([c, c'])) dt, which equals Q(P'(2 * lifted area))."""
    if not c.closed:
        raise ValueError("obstruction value is defined for closed curves")
    return Q(Pprime(vscale(2, lift_area(c))))


# the unfillable loop in the central product


def example_u0(k: int, m: int) -> tuple:
    """e_{1,2} + e_{3,4} + ... + e_{2m+1,2m+2} as a V2 vector of F(k)."""
    v = [Fraction(0)] * (k * (k - 1) // 2)
    for j in range(m + 1):
        v[pair_index(2 * j, 2 * j + 1, k)] = Fraction(1)
    return tuple(v)


def embed_first_copy(h: GradedLieAlgebra, c: PLCurve) -> PLCurve:
    k = c.algebra.layer_dims[0]
    pad = zero_vec(h.layer_dims[0] - k)
    return PLCurve(h, tuple(p + pad for p in c.vertices))


def sum_bracket_area(k: int, m: int, vertices) -> tuple:
    """Lifted area of a W1 loop computed in V2 before projecting (bracket summed over copies)."""
    F = free_step2(k)
    total = zero_vec(k * (k - 1) // 2)
    for a, b in zip(vertices, vertices[1:]):
        for c in range(m):
            total = vadd(total, F.v1_bracket(a[c * k : (c + 1) * k], b[c * k : (c + 1) * k]))
    return vscale(HALF, total)


def dual_functional(w: Sequence) -> LinearFunctional:
    """A functional Q with Q(w) = 1 supported on w's first nonzero coordinate."""
    i = next(i for i, x in enumerate(w) if x != 0)
    cov = [Fraction(0)] * len(w)
    cov[i] = 1 / w[i]
    return LinearFunctional(tuple(cov))


@dataclass
class ObstructionCertificate:
    k: int
    m: int
    U: Subspace
    Uprime: Subspace
    vs: tuple
    loop: PLCurve  # in W1 of the central product
    lifted_area: tuple
    projected_area_P: tuple
    projected_area_Pprime: tuple
    obstruction: Fraction
    generator_rank: int
    inaccessibility: InaccessibilityCertificate

    def to_json(self) -> dict:
        return {
            "type": "obstruction",
            "group": {
                "k": self.k,
                "m": self.m,
                "U": [format_vec(b) for b in self.U.basis],
                "Uprime": [format_vec(b) for b in self.Uprime.basis],
            },
            "vs": [format_vec(v) for v in self.vs],
            "loop": self.loop.to_json(),
            "lifted_area": format_vec(self.lifted_area),
            "projected_area_P": format_vec(self.projected_area_P),
            "projected_area_Pprime": format_vec(self.projected_area_Pprime),
            "obstruction_value": format_rat(self.obstruction),
            "generator_rank": self.generator_rank,
            "inaccessibility": self.inaccessibility.to_json(),
        }


def witness_certificate(
    k: int,
    m: int,
    U: Optional[Subspace] = None,
    Uprime: Optional[Subspace] = None,
    vs: Optional[Sequence[Sequence]] = None,
) -> ObstructionCertificate:
    """Build and verify the closed horizontal loop in the m-fold central product.

    Defaults to U = span{u0}, U' = 0 and the standard basis pairs, which needs
    k >= 2(m+1).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    F = free_step2(k)
    n2 = F.layer_dims[1]
    if U is None:
        if k < 2 * (m + 1):
            raise ValueError("the standard witness needs k >= 2(m+1); got k=%d, m=%d" % (k, m))
        U = Subspace.span([example_u0(k, m)], n2)
        vs = [unit_vec(k, i) for i in range(2 * m + 2)]
    elif vs is None:
        raise ValueError("an explicit U needs the first-layer vectors of the loop")
    if Uprime is None:
        Uprime = Subspace.zero(n2)

    loop_F = paper_loop(F, vs)
    u0 = lift_area(loop_F)
    inacc = check_inaccessible(F, U, Uprime, m)

    gU, P = quotient_step2(F, U)
    Pprime = QuotientMap(Uprime)
    h = central_product_algebra(gU, m)
    loop = embed_first_copy(h, loop_F)

    area_P = P(u0)
    area_P_h = lift_area(loop)
    area_Pprime = Pprime(u0)
    if not loop.closed:
        raise CertificateError("loop_closed", "loop does not return to its start")
    if area_P_h != area_P:
        raise CertificateError("area_agreement", "area in the central product disagrees with P(u0)")
    if not is_zero(area_P):
        raise CertificateError("P_area_zero", "P(u0) != 0, the lift does not close in H")
    if is_zero(area_Pprime):
        raise CertificateError("Pprime_area_nonzero", "P'(u0) = 0")
    if not (inacc.verdict == "inaccessible" and inacc.exact):
        raise CertificateError("inaccessible", "U is not certified m-inaccessible (verdict %s)" % inacc.verdict)
    Q = dual_functional(area_Pprime)
    return ObstructionCertificate(
        k=k,
        m=m,
        U=U,
        Uprime=Uprime,
        vs=tuple(vec(v) for v in vs),
        loop=loop,
        lifted_area=u0,
        projected_area_P=area_P,
        projected_area_Pprime=area_Pprime,
        obstruction=obstruction_value(loop_F, Q, Pprime),
        generator_rank=wedge_rank(F, u0) if U.dim == 1 else -1,
        inaccessibility=inacc,
    )


def verify_certificate(data: dict) -> list:
    """Recompute every invariant of a serialized obstruction certificate.

    Returns a list of (check, message) failures; empty means valid.
    """
    fails = []

    def fail(check, msg):
        fails.append((check, msg))

    try:
        grp = data["group"]
        k, m = int(grp["k"]), int(grp["m"])
        if k < 2 or m < 1:
            fail("group", "k=%d, m=%d out of range" % (k, m))
            return fails
        n2 = k * (k - 1) // 2
        U = Subspace.span([parse_vec(b) for b in grp["U"]], n2)
        Uprime = Subspace.span([parse_vec(b) for b in grp["Uprime"]], n2)
        verts = [parse_vec(p) for p in data["loop"]["vertices"]]
        vs = [parse_vec(v) for v in data["vs"]]
        lifted = parse_vec(data["lifted_area"])
        stored_P = parse_vec(data["projected_area_P"])
        stored_Pp = parse_vec(data["projected_area_Pprime"])
        stored_obs = to_rat(data["obstruction_value"])
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        fail("format", "unreadable certificate field: %s" % exc)
        return fails

    if U.dim == 0:
        fail("U", "U is trivial")
        return fails
    if not Uprime.is_subspace_of(U) or Uprime.dim >= U.dim:
        fail("Uprime", "Uprime is not a proper subspace of U")
        return fails
    if any(len(p) != m * k for p in verts) or len(verts) < 2:
        fail("loop_dimension", "loop vertices do not live in W1 of dimension m*k = %d" % (m * k))
        return fails
    if verts[0] != verts[-1]:
        fail("loop_closed", "loop is not closed")
    if vs and len(vs) % 2 == 0 and all(len(v) == k for v in vs):
        pad = zero_vec((m - 1) * k)
        expected = [p + pad for p in paper_loop(free_step2(k), vs).vertices]
        if verts != expected:
            fail("loop_matches_vs", "loop is not the rectangle loop of the stored vs in the first copy")
    else:
        fail("loop_matches_vs", "stored vs is not an even list of first-layer vectors")
    area = sum_bracket_area(k, m, verts)
    if area != lifted:
        fail("lifted_area", "stored lifted area does not match the loop")
    if not U.contains(area):
        fail("P_area_zero", "lifted area is not in U, so the lift does not close in H")
    if Uprime.contains(area):
        fail("Pprime_area_nonzero", "lifted area lies in Uprime")
    P, Pp = QuotientMap(U), QuotientMap(Uprime)
    if len(lifted) == n2:
        if P(lifted) != stored_P or not is_zero(stored_P):
            fail("projected_area_P", "stored P-area is not P(lifted area) = 0")
        if Pp(lifted) != stored_Pp or is_zero(stored_Pp):
            fail("projected_area_Pprime", "stored P'-area is not the nonzero P'(lifted area)")
        if not is_zero(stored_Pp) and len(stored_Pp) == Pp.target_dim:
            Q = dual_functional(stored_Pp)
            if Q(Pp(vscale(2, area))) != stored_obs:
                fail("obstruction_value", "stored obstruction value does not match the loop")
    if U.dim == 1 and data.get("generator_rank") != wedge_rank(free_step2(k), U.basis[0]):
        fail("generator_rank", "stored generator rank does not match recomputation")

    inacc = data.get("inaccessibility")
    if not isinstance(inacc, dict):
        fail("inaccessible", "missing inaccessibility certificate")
        return fails
    try:
        sub = InaccessibilityCertificate.from_json(inacc)
    except (KeyError, TypeError, ValueError) as exc:
        fail("inaccessible", "unreadable inaccessibility certificate: %s" % exc)
        return fails
    if sub.k != k or sub.m != m or sub.U != U or sub.Uprime != Uprime:
        fail("inaccessible", "inaccessibility certificate is for a different (k, m, U, U')")
    if sub.verdict != "inaccessible" or not sub.exact:
        fail("inaccessible", "inaccessibility verdict is %s" % sub.verdict)
    for msg in recheck_inaccessibility(inacc):
        fail("inaccessible", msg)
    return fails
