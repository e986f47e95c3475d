"""The bracket cone C_m and m-inaccessible subspaces.

In the free step-2 algebra F(k) a second-layer vector is identified with a
k x k antisymmetric matrix (e_{i,j} -> E_ij - E_ji). A vector is a sum of m
brackets of first-layer vectors exactly when that matrix has rank <= 2m.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from carnotcert import _backend
from carnotcert.liealg import GradedLieAlgebra, free_rank, free_step2, pair_index, present, require_step2
from carnotcert.ratlin import (
    DimensionError,
    RatMatrix,
    Subspace,
    format_vec,
    is_zero,
    parse_vec,
    rank,
    skew_decompose,
    solve,
    vadd,
    vec,
    vscale,
    zero_vec,
)

VERDICTS = ("inaccessible", "not_inaccessible", "inconclusive")

SAMPLE_BOUND = 100
ROUND_DENOMINATOR = 10**6


@dataclass(frozen=True)
class WedgeMatrix:
    k: int
    matrix: RatMatrix

    @property
    def rank(self) -> int:
        return rank(self.matrix)


def _wedge_rows(v: Sequence, k: int) -> tuple:
    a = [[Fraction(0)] * k for _ in range(k)]
    for i, j in combinations(range(k), 2):
        x = v[pair_index(i, j, k)]
        if x:
            a[i][j] = x
            a[j][i] = -x
    return tuple(tuple(r) for r in a)


def wedge_matrix(g: GradedLieAlgebra, v: Sequence) -> WedgeMatrix:
    k = free_rank(g)
    v = vec(v)
    if len(v) != g.layer_dims[1]:
        raise DimensionError("V2 vector of length %d, expected %d" % (len(v), g.layer_dims[1]))
    return WedgeMatrix(k, RatMatrix(_wedge_rows(v, k), k))


def wedge_to_vector(A: RatMatrix) -> tuple:
    k = A.nrows
    return tuple(A[i, j] for i, j in combinations(range(k), 2))


def wedge_rank(g: GradedLieAlgebra, v: Sequence) -> int:
    return wedge_matrix(g, v).rank


def cone_member_free(g: GradedLieAlgebra, v: Sequence, m: int) -> bool:
    return wedge_rank(g, v) <= 2 * m


def bracket_decomposition(g: GradedLieAlgebra, v: Sequence) -> list:
    """Pairs (v_i, w_i) of first-layer vectors with sum_i [v_i, w_i] = v."""
    W = wedge_matrix(g, v)
    return skew_decompose(W.matrix)


def reassemble_brackets(g: GradedLieAlgebra, pairs) -> tuple:
    total = zero_vec(g.layer_dims[1])
    for a, b in pairs:
        total = vadd(total, g.v1_bracket(a, b))
    return total


# Pfaffian route (independent of elimination)


def principal_pfaffians(A: Sequence[Sequence], max_size: int) -> dict:
    """All principal Pfaffians of even size <= max_size, keyed by index bitmask."""
    return _backend.pfaffian_table([list(r) for r in A], max_size)


def pfaffian_rank(A: Sequence[Sequence]) -> int:
    """Largest size of a nonvanishing principal Pfaffian, which equals the rank."""
    n = len(A)
    table = principal_pfaffians(A, n)
    best = 0
    for mask, val in table.items():
        if val != 0:
            best = max(best, bin(mask).count("1"))
    return best


def cone_member_pfaffian(A: Sequence[Sequence], m: int) -> bool:
    """rank <= 2m decided by vanishing of every principal (2m+2)-Pfaffian."""
    n = len(A)
    size = 2 * m + 2
    if size > n:
        return True
    table = principal_pfaffians(A, size)
    return all(val == 0 for mask, val in table.items() if bin(mask).count("1") == size)


# certificates


@dataclass
class InaccessibilityCertificate:
    k: int
    algebra_hash: str
    U: Subspace
    Uprime: Subspace
    m: int
    verdict: str
    exact: bool
    evidence: list = field(default_factory=list)
    witness: Optional[dict] = None

    def to_json(self) -> dict:
        out = {
            "type": "inaccessibility",
            "algebra": self.algebra_hash,
            "k": self.k,
            "U": [format_vec(b) for b in self.U.basis],
            "Uprime": [format_vec(b) for b in self.Uprime.basis],
            "m": self.m,
            "verdict": self.verdict,
            "exact": self.exact,
            "evidence": self.evidence,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out

    @classmethod
    def from_json(cls, data: dict) -> "InaccessibilityCertificate":
        k = int(data["k"])
        n2 = k * (k - 1) // 2
        return cls(
            k=k,
            algebra_hash=data["algebra"],
            U=Subspace.span([parse_vec(b) for b in data["U"]], n2),
            Uprime=Subspace.span([parse_vec(b) for b in data["Uprime"]], n2),
            m=int(data["m"]),
            verdict=data["verdict"],
            exact=bool(data["exact"]),
            evidence=list(data.get("evidence", [])),
            witness=data.get("witness"),
        )


def _witness(g, u) -> dict:
    pairs = bracket_decomposition(g, u)
    return {
        "vector": format_vec(u),
        "rank": 2 * len(pairs),
        "decomposition": [[format_vec(a), format_vec(b)] for a, b in pairs],
    }


def check_inaccessible(g: GradedLieAlgebra, U: Subspace, Uprime: Optional[Subspace], m: int) -> InaccessibilityCertificate:
    """Decide whether C_m meets U only inside Uprime (F(k) only)."""
    k = free_rank(g)
    n2 = g.layer_dims[1]
    if m < 1:
        raise ValueError("m must be >= 1")
    if U.ambient_dim != n2:
        raise DimensionError("U must live in V2 of dimension %d" % n2)
    if U.dim == 0:
        raise ValueError("U must be a nontrivial subspace")
    if Uprime is None:
        Uprime = Subspace.zero(n2)
    if Uprime.ambient_dim != n2 or not Uprime.is_subspace_of(U) or Uprime.dim >= U.dim:
        raise ValueError("Uprime must be a proper subspace of U")

    cert = InaccessibilityCertificate(k, g.spec_hash(), U, Uprime, m, "inconclusive", False)
    if U.dim == 1:
        u = U.basis[0]
        r = wedge_rank(g, u)
        cert.evidence.append({"vector": format_vec(u), "rank": r})
        if r > 2 * m:
            cert.verdict, cert.exact = "inaccessible", True
        else:
            cert.verdict, cert.exact = "not_inaccessible", True
            cert.witness = _witness(g, u)
        return cert

    found = _search_witness(g, U, Uprime, m, cert.evidence)
    if found is not None:
        cert.verdict, cert.exact = "not_inaccessible", True
        cert.witness = _witness(g, found)
        return cert
    if U.dim == 2:
        _decide_plane(g, U, Uprime, m, cert)
    return cert


def _search_witness(g, U, Uprime, m, evidence, box: int = 2) -> Optional[tuple]:
    """Exhaustive small-integer combinations of U's basis; returns a witness outside Uprime."""
    d = U.dim
    limit = box if d <= 3 else 1
    for coeffs in np.ndindex(*([2 * limit + 1] * d)):
        c = [x - limit for x in coeffs]
        if all(x == 0 for x in c):
            continue
        # first nonzero coefficient positive: opposite vectors have equal rank
        if next(x for x in c if x != 0) < 0:
            continue
        u = zero_vec(U.ambient_dim)
        for ci, b in zip(c, U.basis):
            if ci:
                u = vadd(u, vscale(ci, b))
        if Uprime.contains(u):
            continue
        r = wedge_rank(g, u)
        if r <= 2 * m:
            evidence.append({"vector": format_vec(u), "rank": r})
            return u
    evidence.append({"search": "integer combinations", "box": limit, "witness": None})
    return None


def _decide_plane(g, U, Uprime, m, cert):
    """Exact decision on a 2-dimensional U via the binary Pfaffian forms.

    Points s*b1 + t*b2 with rank <= 2m are the common real zeros of all
    principal (2m+2)-Pfaffians, homogeneous of degree m+1 in (s, t).
    """
    import sympy

    k = g.layer_dims[0]
    b1, b2 = U.basis
    size = 2 * m + 2
    if size > k:
        cert.verdict, cert.exact = "not_inaccessible", True
        u = b1 if not Uprime.contains(b1) else b2
        cert.witness = _witness(g, u)
        return
    A1 = _wedge_rows(b1, k)
    A2 = _wedge_rows(b2, k)
    deg = m + 1
    samples = []
    for t in range(deg + 1):
        At = [[A1[i][j] + t * A2[i][j] for j in range(k)] for i in range(k)]
        samples.append(principal_pfaffians(At, size))
    tsym = sympy.Symbol("t")
    gcd = sympy.Poly(0, tsym, domain="QQ")
    for mask in samples[0]:
        if bin(mask).count("1") != size:
            continue
        pts = [(t, sympy.Rational(samples[t][mask].numerator, samples[t][mask].denominator)) for t in range(deg + 1)]
        poly = sympy.Poly(sympy.interpolate(pts, tsym), tsym, domain="QQ")
        gcd = sympy.gcd(gcd, poly)
        if gcd.degree() == 0 and not gcd.is_zero:
            break
    record = {"method": "binary Pfaffian forms", "gcd": [str(c) for c in gcd.all_coeffs()]}
    cert.evidence.append(record)

    # point at infinity of the chart: the line through b2
    r_inf = wedge_rank(g, b2)
    candidates = []
    if r_inf <= 2 * m:
        candidates.append(("rational", b2))
    if gcd.is_zero:
        candidates.append(("rational", b1))
    elif gcd.degree() > 0:
        for root in gcd.real_roots():
            if root.is_Rational:
                t = Fraction(int(root.p), int(root.q))
                candidates.append(("rational", vadd(b1, vscale(t, b2))))
            else:
                candidates.append(("irrational", str(root)))
    record["real_zeros"] = [c[1] if c[0] == "irrational" else format_vec(c[1]) for c in candidates]
    for kind, u in candidates:
        if kind == "irrational":
            # a rational line of Uprime has a rational parameter, so this point is outside it
            cert.verdict, cert.exact = "inconclusive", False
            record["note"] = "irrational common zero; no rational witness"
            return
        if not Uprime.contains(u):
            cert.verdict, cert.exact = "not_inaccessible", True
            cert.witness = _witness(g, u)
            return
    cert.verdict, cert.exact = "inaccessible", True


def recheck_inaccessibility(data: dict) -> list:
    """Re-derive an inaccessibility certificate from JSON; returns failure messages."""
    failures = []
    cert = InaccessibilityCertificate.from_json(data)
    g = free_step2(cert.k)
    if cert.algebra_hash != g.spec_hash():
        failures.append("algebra hash does not match F(%d)" % cert.k)
    if cert.verdict not in VERDICTS:
        failures.append("unknown verdict %r" % cert.verdict)
        return failures
    if cert.verdict in ("inaccessible", "not_inaccessible") and not cert.exact:
        failures.append("exact verdict without exactness flag")
    for item in cert.evidence:
        if "rank" in item and "vector" in item:
            v = parse_vec(item["vector"])
            if not cert.U.contains(v):
                failures.append("evidence vector outside U")
            elif wedge_rank(g, v) != item["rank"]:
                failures.append("stored rank %s does not match recomputation" % item["rank"])
    if cert.witness is not None:
        w = parse_vec(cert.witness["vector"])
        pairs = [(parse_vec(a), parse_vec(b)) for a, b in cert.witness["decomposition"]]
        if reassemble_brackets(g, pairs) != w:
            failures.append("witness decomposition does not reassemble")
        if len(pairs) > cert.m:
            failures.append("witness uses more than m brackets")
        if not cert.U.contains(w) or cert.Uprime.contains(w):
            failures.append("witness not in U minus Uprime")
    try:
        fresh = check_inaccessible(g, cert.U, cert.Uprime, cert.m)
    except (ValueError, DimensionError) as exc:
        failures.append("recomputation rejected inputs: %s" % exc)
        return failures
    if fresh.verdict != cert.verdict:
        failures.append("verdict %s does not match recomputed %s" % (cert.verdict, fresh.verdict))
    return failures


# quotient membership


@dataclass
class QuotientMembership:
    member: bool
    lift: Optional[tuple] = None
    decomposition: Optional[list] = None
    transcript: list = field(default_factory=list)

    @property
    def status(self) -> str:
        return "member" if self.member else "no_witness_found"

    def to_json(self) -> dict:
        out = {"status": self.status, "transcript": self.transcript}
        if self.member:
            out["lift"] = format_vec(self.lift)
            out["decomposition"] = [[format_vec(a), format_vec(b)] for a, b in self.decomposition]
        return out


def cone_member_quotient(
    free: GradedLieAlgebra,
    v_lift: Sequence,
    m: int,
    U: Subspace,
    restarts: int = 8,
    seed: int = 0,
) -> QuotientMembership:
    """Search lifts v + u (u in U) of rank <= 2m.

    A floating-point minimizer proposes lifts; a proposal counts only after
    rounding to rationals and exact verification.
    """
    from scipy.optimize import minimize

    k = free_rank(free)
    v = vec(v_lift)
    res = QuotientMembership(False)

    def exact_try(u_coeffs, how):
        lift = v
        for c, b in zip(u_coeffs, U.basis):
            if c:
                lift = vadd(lift, vscale(c, b))
        r = wedge_rank(free, lift)
        res.transcript.append({"try": how, "coeffs": format_vec(u_coeffs), "rank": r})
        if r <= 2 * m:
            res.member = True
            res.lift = lift
            res.decomposition = bracket_decomposition(free, lift)
            return True
        return False

    d = U.dim
    if exact_try(zero_vec(d), "zero lift") or d == 0:
        return res
    for i in range(d):
        for s in (1, -1):
            c = [Fraction(0)] * d
            c[i] = Fraction(s)
            if exact_try(tuple(c), "basis lift"):
                return res

    V = np.array(_wedge_rows(v, k), dtype=float)
    Us = [np.array(_wedge_rows(b, k), dtype=float) for b in U.basis]
    scale = max(1.0, float(np.abs(V).max()))

    def objective(t):
        M = V + sum(ti * Ui for ti, Ui in zip(t, Us))
        s = np.linalg.svd(M, compute_uv=False)
        return float(np.sum(s[2 * m :] ** 2)) / scale**2

    rng = np.random.default_rng(np.random.SeedSequence([seed, 7919]))
    for attempt in range(restarts):
        t0 = rng.normal(scale=2.0, size=d)
        opt = minimize(objective, t0, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-16, "maxiter": 4000 * d})
        opt = minimize(objective, opt.x, method="BFGS", options={"gtol": 1e-12})
        coeffs = tuple(Fraction(float(x)).limit_denominator(ROUND_DENOMINATOR) for x in opt.x)
        res.transcript.append({"restart": attempt, "objective": float(opt.fun)})
        if exact_try(coeffs, "rounded minimizer"):
            return res
    return res


# sampling under the dimension bound


class SamplingFailure(RuntimeError):
    def __init__(self, message, transcript):
        super().__init__(message)
        self.transcript = transcript


@dataclass
class SampleResult:
    subspace: Subspace
    vector: tuple
    exact: bool
    rank: Optional[int]
    trials_used: int
    transcript: list

    def to_json(self) -> dict:
        return {
            "status": "success",
            "U": self.subspace.to_json(),
            "vector": format_vec(self.vector),
            "rank": self.rank,
            "exact": self.exact,
            "trials_used": self.trials_used,
            "transcript": self.transcript,
        }


def dimension_bound_holds(g: GradedLieAlgebra, m: int) -> bool:
    k, n2 = g.layer_dims
    return n2 > (2 * k - 1) * m


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


def sample_inaccessible(g: GradedLieAlgebra, m: int, trials: int, seed: int, bound: int = SAMPLE_BOUND) -> SampleResult:
    """Draw random second-layer vectors until one spans an m-inaccessible line."""
    require_step2(g)
    k, n2 = g.layer_dims
    if not dimension_bound_holds(g, m):
        warnings.warn(
            "dim V2 = %d does not exceed (2 dim V1 - 1) m = %d; sampling may not succeed" % (n2, (2 * k - 1) * m),
            stacklevel=2,
        )
    from carnotcert.liealg import is_free_step2

    free = is_free_step2(g)
    pres = None if free else present(g)
    transcript = []
    for trial in range(trials):
        rng = trial_rng(seed, trial)
        v = tuple(Fraction(int(x)) for x in rng.integers(-bound, bound + 1, size=n2))
        if is_zero(v):
            transcript.append({"trial": trial, "vector": format_vec(v), "outcome": "zero vector"})
            continue
        if free:
            r = wedge_rank(g, v)
            transcript.append({"trial": trial, "vector": format_vec(v), "rank": r})
            if r > 2 * m:
                return SampleResult(Subspace.span([v], n2), v, True, r, trial + 1, transcript)
        else:
            lift = solve(pres.projection, v)
            q = cone_member_quotient(pres.free, lift, m, pres.U, seed=seed * 1000 + trial)
            transcript.append({"trial": trial, "vector": format_vec(v), "search": q.status})
            if not q.member:
                return SampleResult(Subspace.span([v], n2), v, False, None, trial + 1, transcript)
    raise SamplingFailure("no inaccessible line found in %d trials" % trials, transcript)
