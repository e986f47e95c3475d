"""Command-line interface.

Every subcommand writes one JSON document to stdout. Exit codes: 0 for
success or an affirmative exact verdict, 1 for a negative (or inexact)
verdict, 2 for errors, which are reported as a JSON error object.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

from carnotcert import __version__
from carnotcert.cdh import heisenberg_algebra
from carnotcert.cone import (
    SamplingFailure,
    check_inaccessible,
    recheck_inaccessibility,
    sample_inaccessible,
)
from carnotcert.curve import CertificateError, PLCurve, example_u0, group_lift_endpoint, lift_area, verify_certificate, witness_certificate
from carnotcert.group import Word, word_eval
from carnotcert.liealg import (
    GradedLieAlgebra,
    central_product_algebra,
    free_step2,
    quotient_step2,
    validate,
)
from carnotcert.ratlin import DimensionError, Subspace, format_vec, parse_vec, vec

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2


class UsageError(ValueError):
    pass


def _read_json(path):
    if path == "-":
        return json.load(sys.stdin)
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _emit(payload):
    sys.stdout.write(json.dumps(payload, indent=2) + "\n")


def load_algebra(path) -> GradedLieAlgebra:
    data = _read_json(path)
    if "layer_dims" not in data and "algebra" in data:
        data = data["algebra"]
    return GradedLieAlgebra.from_json(data)


def load_subspace(path, g: GradedLieAlgebra, key: str = "U") -> Subspace:
    """Read a V2 subspace: {"ambient_dim", "basis"}, a bundle with a ``key`` entry, or label dicts."""
    data = _read_json(path)
    if isinstance(data, dict) and "basis" not in data and key in data:
        data = data[key]
    n2 = g.layer_dims[1]
    k = g.layer_dims[0]
    if isinstance(data, list):
        data = {"basis": data}
    ambient = int(data.get("ambient_dim", n2))
    if ambient != n2:
        raise DimensionError("subspace ambient dimension %d, but dim V2 = %d" % (ambient, n2))
    basis = []
    for b in data["basis"]:
        if isinstance(b, dict):
            v = [0] * n2
            for lab, x in b.items():
                idx = g.index(lab) - k
                if idx < 0:
                    raise UsageError("label %s is not in V2" % lab)
                v[idx] = x
            basis.append(vec(v))
        else:
            basis.append(parse_vec(b))
    return Subspace.span(basis, n2)


def cmd_free(args):
    _emit(free_step2(args.k).to_json())
    return EXIT_OK


def cmd_example42(args):
    if args.k < 2 * (args.m + 1):
        raise UsageError("need k >= 2(m+1), got k=%d, m=%d" % (args.k, args.m))
    g = free_step2(args.k)
    n2 = g.layer_dims[1]
    _emit(
        {
            "algebra": g.to_json(),
            "U": Subspace.span([example_u0(args.k, args.m)], n2).to_json(),
            "Uprime": Subspace.zero(n2).to_json(),
            "m": args.m,
        }
    )
    return EXIT_OK


def cmd_quotient(args):
    g = load_algebra(args.algebra)
    U = load_subspace(args.U, g)
    q, P = quotient_step2(g, U)
    _emit({"algebra": q.to_json(), "projection": P.to_json()})
    return EXIT_OK


def cmd_central_product(args):
    g = load_algebra(args.algebra)
    U = load_subspace(args.U, g)
    q, _ = quotient_step2(g, U)
    _emit(central_product_algebra(q, args.copies).to_json())
    return EXIT_OK


def cmd_inaccessible(args):
    g = load_algebra(args.algebra)
    U = load_subspace(args.U, g)
    Up = load_subspace(args.Uprime, g, key="Uprime") if args.Uprime else None
    cert = check_inaccessible(g, U, Up, args.m)
    _emit(cert.to_json())
    return EXIT_OK if cert.verdict == "inaccessible" and cert.exact else EXIT_NEGATIVE


def cmd_sample(args):
    g = load_algebra(args.algebra)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            res = sample_inaccessible(g, args.m, args.trials, args.seed)
        except SamplingFailure as exc:
            for w in caught:
                print("warning: %s" % w.message, file=sys.stderr)
            _emit({"status": "failure", "message": str(exc), "transcript": exc.transcript})
            return EXIT_NEGATIVE
    for w in caught:
        print("warning: %s" % w.message, file=sys.stderr)
    _emit(res.to_json())
    return EXIT_OK if res.exact else EXIT_NEGATIVE


def cmd_lift(args):
    g = load_algebra(args.algebra)
    c = PLCurve.from_json(g, _read_json(args.curve))
    out = {"area": format_vec(lift_area(c)), "closed": c.closed}
    if c.based:
        out["endpoint"] = group_lift_endpoint(c).to_json()
    else:
        print("note: curve does not start at 0; endpoint omitted", file=sys.stderr)
        out["endpoint"] = None
    _emit(out)
    return EXIT_OK


def cmd_witness(args):
    try:
        cert = witness_certificate(args.k, args.m)
    except CertificateError as exc:
        _emit({"valid": False, "failed_check": exc.check, "message": str(exc)})
        return EXIT_NEGATIVE
    payload = cert.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(payload, indent=2) + "\n")
    _emit(payload)
    return EXIT_OK


def cmd_verify(args):
    data = _read_json(args.certificate)
    kind = data.get("type", "obstruction") if isinstance(data, dict) else None
    if kind == "inaccessibility":
        try:
            fails = [("inaccessible", msg) for msg in recheck_inaccessibility(data)]
        except (KeyError, TypeError, ValueError) as exc:
            fails = [("format", "unreadable certificate field: %s" % exc)]
    elif kind == "obstruction":
        fails = verify_certificate(data)
    else:
        raise UsageError("unknown certificate type %r" % (kind,))
    _emit({"valid": not fails, "type": kind, "failures": [{"check": c, "message": m} for c, m in fails]})
    return EXIT_OK if not fails else EXIT_NEGATIVE


def cmd_heisenberg(args):
    _emit(heisenberg_algebra(args.level).to_json())
    return EXIT_OK


def cmd_word(args):
    g = load_algebra(args.algebra)
    data = _read_json(args.word)
    w = Word.from_json(g, data)
    if data.get("algebra") not in (None, g.spec_hash()):
        print("note: word names algebra %r, evaluating in %s" % (data["algebra"], g.spec_hash()), file=sys.stderr)
    x = word_eval(g, w)
    out = {"element": x.to_json(), "is_identity": x.is_identity()}
    _emit(out)
    if args.is_identity:
        return EXIT_OK if x.is_identity() else EXIT_NEGATIVE
    return EXIT_OK


def cmd_validate(args):
    report = validate(load_algebra(args.algebra))
    _emit(report.to_json())
    return EXIT_OK if report.ok else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="carnotcert", description="Exact computations in step-2 Carnot groups.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("free", help="free step-2 algebra F(k)")
    s.add_argument("--k", type=int, required=True)
    s.set_defaults(func=cmd_free)

    s = sub.add_parser("example42", help="F(k) with U = span{e_{1,2} + ... + e_{2m+1,2m+2}}")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.set_defaults(func=cmd_example42)

    s = sub.add_parser("quotient", help="quotient by a subspace of V2")
    s.add_argument("--algebra", required=True)
    s.add_argument("--U", required=True)
    s.set_defaults(func=cmd_quotient)

    s = sub.add_parser("central-product", help="central product of copies of g/U")
    s.add_argument("--algebra", required=True)
    s.add_argument("--U", required=True)
    s.add_argument("--copies", type=int, required=True)
    s.set_defaults(func=cmd_central_product)

    s = sub.add_parser("inaccessible", help="certify m-inaccessibility of U (exit 0 iff inaccessible)")
    s.add_argument("--algebra", required=True)
    s.add_argument("--U", required=True)
    s.add_argument("--Uprime", default=None, help="defaults to the zero subspace")
    s.add_argument("--m", type=int, required=True)
    s.set_defaults(func=cmd_inaccessible)

    s = sub.add_parser("sample-inaccessible", help="sample an m-inaccessible line")
    s.add_argument("--algebra", required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--trials", type=int, default=10)
    s.add_argument("--seed", type=int, required=True)
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("lift", help="lifted area and endpoint of a PL curve")
    s.add_argument("--curve", required=True)
    s.add_argument("--algebra", required=True)
    s.set_defaults(func=cmd_lift)

    s = sub.add_parser("witness", help="build the unfillable loop certificate")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_witness)

    s = sub.add_parser("verify", help="re-verify a serialized certificate")
    s.add_argument("--certificate", required=True)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("heisenberg", help="complex, quaternionic or octonionic Heisenberg algebra")
    s.add_argument("--level", type=int, choices=(1, 2, 3), required=True)
    s.set_defaults(func=cmd_heisenberg)

    s = sub.add_parser("word", help="evaluate a word in the lattice generators")
    s.add_argument("--algebra", required=True)
    s.add_argument("--word", required=True)
    s.add_argument("--is-identity", action="store_true")
    s.set_defaults(func=cmd_word)

    s = sub.add_parser("validate", help="validate an algebra's structure constants")
    s.add_argument("--algebra", required=True)
    s.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, TypeError, IndexError, OSError) as exc:
        _emit({"error": type(exc).__name__, "message": str(exc)})
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
