"""
Command-line front end.

Exit codes: 0 verified / valid, 1 usage or parse error, 2 invalid input,
3 not verified within the bound.
"""

from __future__ import annotations

import argparse
import sys

from detcert import familyfile, report
from detcert.certify import (
    certify_finite_determinacy,
    cm2_check,
    complete_jet,
    eq1_check,
    generic_sample,
    lift_eq1,
    tangent_codimension,
)
from detcert.errors import (
    DetcertError,
    DimensionError,
    PreconditionError,
    RetryLimitExceeded,
    ValidationError,
)
from detcert.familyfile import FamilyFileError
from detcert.graded import Mode
from detcert.matrix_family import RankStratum, expected_codim, validate_whomog

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_NOT_VERIFIED = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt_target(t, letter: str = "x") -> str:
    if t is None:
        return "-"
    mono = "*".join(f"{letter}{k + 1}^{a}" if a > 1 else f"{letter}{k + 1}" for k, a in enumerate(t.monomial) if a)
    return f"{mono or '1'}*E{t.cell[0] + 1}{t.cell[1] + 1} (level {t.level})"


def _print_levels(records):
    print("  level  ambient  rank")
    for r in records:
        print(f"  {r.level:5d}  {r.ambient_dim:7d}  {r.rank:4d}")


def _emit(args, obj):
    if args.json:
        print(report.dump_document(obj))
        return True
    return False


def cmd_validate(args) -> int:
    F = familyfile.load(args.file)
    try:
        D = validate_whomog(F)
    except ValidationError as exc:
        if args.json:
            print(report.dump_document({"schema": report.SCHEMA_ID, "kind": "validate",
                                        "certificate": report.validation_to_dict(F, None, str(exc))}))
        else:
            print("type: invalid")
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.json:
        print(report.dump_document({"schema": report.SCHEMA_ID, "kind": "validate",
                                    "certificate": report.validation_to_dict(F, D, None)}))
    else:
        print(f"D={D.as_lists()}")
        if D.derived:
            print("derived zero-entry degrees at " + ", ".join(f"({i + 1},{j + 1})" for i, j in sorted(D.derived)))
        print("type: ok")
    return EXIT_OK


def cmd_determinacy(args) -> int:
    F = familyfile.load(args.file)
    cert = certify_finite_determinacy(F, args.level_bound, args.mode, with_codimension=True)
    strict_codim = tangent_codimension(F, Mode.STRICT, args.level_bound)
    cert.facts["strict_codimension"] = strict_codim.total
    if not _emit(args, cert):
        mem = cert.membership
        print(f"family: {F.m}x{F.n}, N={F.N}, w={list(F.weights)}")
        if cert.finitely_determined:
            print(f"verdict: {cert.verdict}")
            if mem.mode == Mode.STRICT.value:
                print(f"k={cert.k}  (M^k * O^mn inside the tangent space)")
            else:
                print(f"k_e={cert.k}  (M^k * O^mn inside the extended tangent space)")
        else:
            print(f"verdict: NotVerifiedUpTo {mem.bound}")
            print(f"obstruction: {_fmt_target(mem.obstruction)}")
        d_e = cert.codimension.total
        print(f"d={strict_codim.total if strict_codim.total is not None else 'unknown'}  "
              f"d_e={d_e if d_e is not None else 'unknown'}")
        for e in cert.eids_conclusion:
            print(f"EIDS t={e.t}: {e.statement} (expected codim {e.expected_codim})")
        _print_levels(mem.covered_levels)
    return EXIT_OK if cert.finitely_determined else EXIT_NOT_VERIFIED


def cmd_eq1(args) -> int:
    L = familyfile.load(args.file)
    cert = eq1_check(L, args.rmax)
    if not _emit(args, cert):
        if cert.holds:
            print(f"Holds(r={cert.r})")
        else:
            print(f"NotVerifiedUpTo {cert.r_max}")
        print("  r  ambient  rank")
        for r, amb, rank in cert.levels:
            print(f"  {r:1d}  {amb:7d}  {rank:4d}")
        for r, t in cert.obstructions:
            print(f"  obstruction at r={r}: {_fmt_target(t, L.letter)}")
    return EXIT_OK if cert.holds else EXIT_NOT_VERIFIED


def cmd_lift(args) -> int:
    L = familyfile.load(args.file)
    eq1 = eq1_check(L, args.rmax)
    if not eq1.holds:
        print(f"refusing to lift: eq1 NotVerifiedUpTo {eq1.r_max}", file=sys.stderr)
        return EXIT_NOT_VERIFIED
    cert = lift_eq1(eq1, args.d, args.level_bound)
    if not _emit(args, cert):
        print(f"F = {cert.family}")
        print(f"verdict: {cert.verdict} (eq1 r={eq1.r}, d={args.d})")
        print(f"x_k^{args.d * eq1.r} E_ij in tangent space: {cert.facts['pure_powers_in_tangent_space']}")
        print(f"direct engine k={cert.k}")
        for e in cert.eids_conclusion:
            print(f"EIDS t={e.t}: {e.statement} (expected codim {e.expected_codim})")
    return EXIT_OK


def cmd_sample(args) -> int:
    rep = generic_sample(args.N, args.m, args.n, args.d, args.trials, args.seed,
                         args.level_bound, args.workers)
    if not _emit(args, rep):
        print(f"passes: {rep.passes}/{rep.trials} (N={rep.N}, m={rep.m}, n={rep.n}, d={rep.d}, seed={rep.seed})")
        for a in rep.failures:
            print(f"  failed: {[[list(c) for c in row] for row in a]}")
    return EXIT_OK


def cmd_cm2(args) -> int:
    F = familyfile.load(args.file)
    cert = cm2_check(F, args.level_bound)
    if not _emit(args, cert):
        if cert.verified:
            print(f"Verified(r={cert.r})")
        else:
            print(f"NotVerifiedUpTo {cert.membership.bound}")
        print(f"ideal: {cert.minor_count} maximal minors, {cert.jacobian_minor_count} Jacobian 2x2 minors")
        s = RankStratum(F.m, F.n, F.n)
        print(f"expected codim of X: {expected_codim(s)}")
    return EXIT_OK if cert.verified else EXIT_NOT_VERIFIED


def cmd_complete(args) -> int:
    G = familyfile.load(args.file)
    H, cert = complete_jet(G, args.d, args.seed, args.r, args.retries, args.level_bound)
    if not _emit(args, cert):
        print(f"H = {H}")
        print(f"verdict: {cert.verdict} (j^{cert.facts['jet_order']} H = G: {cert.facts['jet_matches']})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="detcert", description="Finite determinacy and EIDS certificates for matrix families")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_json(sp):
        sp.add_argument("--json", action="store_true", help="emit a detcert/1 JSON document")
        return sp

    sp = with_json(sub.add_parser("validate", help="check the weighted homogeneous type"))
    sp.add_argument("file")
    sp.set_defaults(func=cmd_validate)

    sp = with_json(sub.add_parser("determinacy", help="certify finite determinacy"))
    sp.add_argument("file")
    sp.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.STRICT.value)
    sp.add_argument("--level-bound", type=int, default=None)
    sp.set_defaults(func=cmd_determinacy)

    sp = with_json(sub.add_parser("eq1", help="check eq1 for a linear family"))
    sp.add_argument("file")
    sp.add_argument("--rmax", type=int, default=6)
    sp.set_defaults(func=cmd_eq1)

    sp = with_json(sub.add_parser("lift", help="lift eq1 to L(x^d)"))
    sp.add_argument("file")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--rmax", type=int, default=6)
    sp.add_argument("--level-bound", type=int, default=None)
    sp.set_defaults(func=cmd_lift)

    sp = with_json(sub.add_parser("sample", help="certify random generic families"))
    for name in ("N", "m", "n", "d", "trials"):
        sp.add_argument(f"--{name}", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--level-bound", type=int, default=None)
    sp.set_defaults(func=cmd_sample)

    sp = with_json(sub.add_parser("cm2", help="Cohen-Macaulay codimension 2 criterion"))
    sp.add_argument("file")
    sp.add_argument("--level-bound", type=int, default=None)
    sp.set_defaults(func=cmd_cm2)

    sp = with_json(sub.add_parser("complete", help="complete a jet to a finitely determined family"))
    sp.add_argument("file")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--r", type=int, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--retries", type=int, default=10)
    sp.add_argument("--level-bound", type=int, default=None)
    sp.set_defaults(func=cmd_complete)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FamilyFileError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RetryLimitExceeded as exc:
        print(f"not verified: {exc}", file=sys.stderr)
        return EXIT_NOT_VERIFIED
    except (ValidationError, PreconditionError, DimensionError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except DetcertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run():
    sys.exit(main())
