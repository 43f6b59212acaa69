"""Command-line front end: ``efa analyze``, ``efa min-op``, ``efa min-inhom``, ``efa exceptional``.

Exit codes: 0 success, 2 invalid input, 3 a cap was exhausted (a partial
report is still written), 4 internal inconsistency or failed verification.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .desingular import IterationCapExceeded, desingularize, exceptional_derivative_values
from .inhomog import minimal_inhomogeneous, normalize, transcendence_verdict
from .io import parse_input
from .minhomog import SieveLimitExceeded, find_min_operator
from .numeric import CorroborationFailure
from .report import AnalysisConfig, analyze, report_from_json, verify_report
from .series import InputValidationError, InternalInconsistencyError

EXIT_OK, EXIT_INPUT, EXIT_CAP, EXIT_BUG = 0, 2, 3, 4


def _describe(a) -> str:
    if a.is_rational():
        return a.approx()
    return f"{a.approx(15)} (root of {a.defining_poly.str(var='x')})"


def _fmt_pairs(records) -> str:
    return "{" + ", ".join(f"({r.alpha.approx(15)}, {r.value.approx(15)})" for r in records) + "}"


def _summary(rep) -> str:
    lines = []
    if rep.min_operator is not None:
        flag = " (minimal within degree cap)" if rep.minimal_within_cap else ""
        lines.append(f"L_min{flag}: {rep.min_operator}")
    if rep.relation is not None:
        eq = rep.relation
        lines.append(f"minimal inhomogeneous relation: order s = {eq.s}, c = {eq.c}")
        lines.append(f"  Q = {eq.Q}")
        lines.append(f"  u_0 = {eq.u0}")
        if rep.verdict == "polynomial":
            lines.append(f"verdict: polynomial, f = {rep.polynomial}")
        else:
            lines.append("verdict: transcendental")
    if rep.exceptional:
        lines.append(f"exceptional set: {_fmt_pairs(rep.exceptional)}")
        for e in rep.exceptional:
            lines.append(f"  alpha = {_describe(e.alpha)}, value = {_describe(e.value)}  [{e.kind}]")
    for j, recs in sorted(rep.derivatives.items()):
        lines.append(f"f^({j}) exceptional set: {_fmt_pairs(recs)}")
    if rep.decomposition is not None:
        dec = rep.decomposition
        lines.append(f"decomposition: p = {dec['p']}, points {dec['points']}, multiplicities {dec['multiplicities']}")
    if rep.status != "complete":
        lines.append(f"status: {rep.status} ({', '.join(rep.flags)})")
        if rep.partial:
            lines.append(f"  {rep.partial.get('message', '')}")
    for note in rep.notes:
        lines.append(f"note: {note}")
    return "\n".join(lines)


def _config(args) -> AnalysisConfig:
    return AnalysisConfig(
        degree_cap=args.degree_cap,
        series_check_order=args.series_check_order,
        fast=args.fast,
        digits=args.digits,
        iteration_cap=args.iteration_cap,
        corroborate=not args.no_corroborate,
    )


def cmd_analyze(args) -> int:
    inp = parse_input(args.input)
    if args.verify:
        doc = json.loads(Path(args.verify).read_text())
        rep = report_from_json(doc)
        if rep.input.operator != inp.operator or rep.input.initial_coeffs[:len(inp.initial_coeffs)] != inp.initial_coeffs:
            print("report was produced for a different input", file=sys.stderr)
            return EXIT_BUG
        checks = verify_report(rep)
        for c in checks:
            print(f"{'PASS' if c.ok else 'FAIL'}  {c.name}" + (f"  ({c.detail})" if c.detail and not c.ok else ""))
        return EXIT_OK if all(c.ok for c in checks) else EXIT_BUG
    rep = analyze(inp, _config(args))
    doc = rep.to_json()
    if args.emit_certificate:
        Path(args.emit_certificate).write_text(json.dumps(doc, indent=1) + "\n")
    if args.json:
        print(json.dumps(doc, indent=1))
    else:
        print(_summary(rep))
    return EXIT_OK if rep.status == "complete" else EXIT_CAP


def cmd_min_op(args) -> int:
    inp = parse_input(args.input)
    res = find_min_operator(inp, args.degree_cap)
    print(f"order {res.order}, degree {res.degree}" + (" (minimal within degree cap)" if res.minimal_within_cap else ""))
    print(res.operator)
    for line in res.log:
        print(f"  {line}")
    return EXIT_OK


def cmd_min_inhom(args) -> int:
    inp = parse_input(args.input)
    res = find_min_operator(inp, args.degree_cap)
    eq = minimal_inhomogeneous(res.operator, inp.series())
    print(f"s = {eq.s}")
    print(f"c = {eq.c}")
    for j, q in enumerate(eq.Q):
        print(f"Q_{j} = {q}")
    print(f"u_0 = {eq.u0}")
    print(f"verdict: {transcendence_verdict(eq).kind}")
    return EXIT_OK


def cmd_exceptional(args) -> int:
    inp = parse_input(args.input)
    f = inp.series()
    res = find_min_operator(inp, args.degree_cap)
    eq = minimal_inhomogeneous(res.operator, f)
    v = transcendence_verdict(eq)
    if v.kind == "polynomial":
        print(f"f = {v.polynomial} is a polynomial: algebraic at every algebraic point")
        return EXIT_OK
    D = desingularize(normalize(eq), iteration_cap=args.iteration_cap, fast=args.fast)
    exc = exceptional_derivative_values(D, args.derivative, f)
    tag = "f" if args.derivative == 0 else f"f^({args.derivative})"
    print(f"{tag}: {{" + ", ".join(f"({e.alpha.approx(15)}, {e.value.approx(15)})" for e in exc.entries) + "}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="efa", description="Algebraic values of E-functions at algebraic points.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("input", help="input JSON file")
        sp.add_argument("--degree-cap", type=int, default=None,
                        help="largest coefficient degree searched for a smaller operator")
        return sp

    a = common(sub.add_parser("analyze", help="full pipeline"))
    a.add_argument("--series-check-order", type=int, default=200)
    a.add_argument("--fast", action="store_true", help="accept direct relations without a full transform")
    a.add_argument("--digits", type=int, default=50, help="working precision of the numeric corroboration")
    a.add_argument("--iteration-cap", type=int, default=None)
    a.add_argument("--emit-certificate", metavar="PATH", help="write the full JSON report here")
    a.add_argument("--verify", metavar="REPORT", help="re-check every certificate in REPORT instead of analyzing")
    a.add_argument("--json", action="store_true", help="print the JSON report instead of a summary")
    a.add_argument("--no-corroborate", action="store_true", help="skip numeric corroboration")
    a.set_defaults(func=cmd_analyze)

    common(sub.add_parser("min-op", help="minimal homogeneous operator")).set_defaults(func=cmd_min_op)
    common(sub.add_parser("min-inhom", help="minimal inhomogeneous relation")).set_defaults(func=cmd_min_inhom)
    e = common(sub.add_parser("exceptional", help="algebraic values of f or a derivative"))
    e.add_argument("--derivative", type=int, default=0)
    e.add_argument("--fast", action="store_true")
    e.add_argument("--iteration-cap", type=int, default=None)
    e.set_defaults(func=cmd_exceptional)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputValidationError as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (IterationCapExceeded, SieveLimitExceeded) as e:
        print(f"cap exhausted: {e}", file=sys.stderr)
        return EXIT_CAP
    except (InternalInconsistencyError, CorroborationFailure) as e:
        print(f"internal inconsistency: {e}", file=sys.stderr)
        return EXIT_BUG
    except ValueError as e:
        if args.command == "exceptional" and "derivative index" in str(e):
            print(f"invalid input: {e}", file=sys.stderr)
            return EXIT_INPUT
        raise


if __name__ == "__main__":
    sys.exit(main())
