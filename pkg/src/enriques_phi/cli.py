"""Command line interface: ``enriques-phi verify|qexp|eval|lattice``."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Callable, Sequence

import mpmath

from .borcherds import ProductParams, phi1_eval, phi2_eval, phi_gamma_leading_qexp
from .enriques import build_lambda_gamma, gamma_by_name
from .lattice import appendix_glue, invariants, standard_lattice
from .modular import DEFAULT_PREC, HalfPlanePoint, eta_eval, j_eval, lambda_eval, parse_complex, weber_eval
from .qseries import format_series2
from .verify import (
    MAIN_POINTS,
    Report,
    reports_to_json,
    verify_appendix,
    verify_denominator,
    verify_even_product,
    verify_main_theorem,
    verify_odd_leading,
    verify_section8,
)

VERIFY_CHECKS = ("main", "even", "odd-leading", "denominator", "section8", "appendix")
LATTICE_NAMES = ("U", "U2", "E8", "E8_2", "K", "Lambda", "I29_2", "appendix")


def _params(args) -> ProductParams:
    return ProductParams(
        height_cutoff=None if args.height is None else float(Fraction(args.height)),
        prec=args.prec,
    )


def _points(args, default: Sequence[tuple[str, str]]) -> list[tuple[str, str]]:
    if (args.tau is None) != (args.tau_prime is None):
        raise ValueError("--tau and --tau-prime must be given together")
    if args.tau is not None:
        return [(args.tau, args.tau_prime)]
    return list(default)


def _jobs(check: str, args) -> list[tuple[str, Callable[..., Report], tuple, dict]]:
    params = _params(args)
    tol = {} if args.tol is None else {"tol": args.tol}
    if check == "main":
        return [
            (f"main {a} {b}", verify_main_theorem, (a, b, params), tol)
            for a, b in _points(args, MAIN_POINTS)
        ]
    if check == "even":
        return [
            (f"even {a} {b}", verify_even_product, (a, b, params), tol)
            for a, b in _points(args, MAIN_POINTS)
        ]
    if check == "odd-leading":
        return [("odd-leading", verify_odd_leading, (args.order or 4,), {})]
    if check == "denominator":
        return [("denominator", verify_denominator, (args.order or 8,), {})]
    if check == "section8":
        extra = {} if args.tol is None else {"tol_a": args.tol, "tol_b": args.tol, "tol_c": args.tol}
        return [
            (f"section8 {a} {b}", verify_section8, (a, b, params), extra)
            for a, b in _points(args, [("4i", "5i")])
        ]
    if check == "appendix":
        return [("appendix", verify_appendix, (), {})]
    raise ValueError(f"unknown check {check!r}")


def _run_job(job) -> Report:
    _, fn, a, kw = job
    return fn(*a, **kw)


def _cmd_verify(args) -> int:
    checks = VERIFY_CHECKS if args.check == "all" else (args.check,)
    jobs = [job for c in checks for job in _jobs(c, args)]
    jobs.sort(key=lambda j: j[0])
    if args.threads and args.threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            reports = list(pool.map(_run_job, jobs))
    else:
        reports = [_run_job(j) for j in jobs]
    for r in reports:
        print(r.summary_line())
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(reports_to_json(reports))
            fh.write("\n")
    return 0 if all(r.passed for r in reports) else 1


def _cmd_qexp(args) -> int:
    lg = build_lambda_gamma(gamma_by_name(args.gamma))
    series = phi_gamma_leading_qexp(lg, args.order if args.order is not None else 2)
    print(format_series2(series))
    print("P = p^(1/2), Q = q^(1/2)")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"gamma": args.gamma, "series": series.to_json_obj()}, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def _complex_json(z, digits: int) -> dict[str, str]:
    z = mpmath.mpc(z)
    return {"re": mpmath.nstr(z.real, digits), "im": mpmath.nstr(z.imag, digits)}


def _cmd_eval(args) -> int:
    prec = args.prec
    coords = [c for c in args.at.split(",") if c.strip()]
    if args.function in ("phi1", "phi2"):
        with mpmath.mp.workprec(prec + 32):
            vals = [parse_complex(c) for c in coords]
        if len(vals) == 2:
            vals = vals + [0] * 8
        if len(vals) != 10:
            raise ValueError("--at needs 2 or 10 comma separated coordinates")
        fn = phi1_eval if args.function == "phi1" else phi2_eval
        out = fn(vals, _params(args))
        result = {
            "value": _complex_json(out.value.value, out.value.digits()),
            "vanishes": out.vanishes,
            "tail_bound": out.tail_bound,
            "terms_used": out.terms_used,
            "height": out.height,
        }
    else:
        if len(coords) != 1:
            raise ValueError("--at needs one point of the upper half-plane")
        t = HalfPlanePoint.from_value(coords[0], prec)
        fn = {"j": j_eval, "eta": eta_eval, "lambda": lambda_eval, "weber": weber_eval}[args.function]
        v = fn(t)
        result = {"value": _complex_json(v.value, v.digits())}
    print(json.dumps({"function": args.function, "at": args.at, **result}, sort_keys=True))
    return 0


def _cmd_lattice(args) -> int:
    L = appendix_glue() if args.name == "appendix" else standard_lattice(args.name)
    info = {
        "name": args.name,
        "rank": len(L.gram),
        "signature": list(L.signature),
        "det": str(L.det),
        "gram": [[str(x) for x in row] for row in L.gram],
    }
    try:
        sig, rank, parity = invariants(L)
        info["two_elementary"] = {"rank": rank, "parity": parity}
    except (ValueError, ArithmeticError):
        info["two_elementary"] = None
    print(json.dumps(info, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tau")
    common.add_argument("--tau-prime", dest="tau_prime")
    common.add_argument("--height", help="height cutoff H; default picks one from the tail target")
    common.add_argument("--prec", type=int, default=DEFAULT_PREC, help="working precision in bits")
    common.add_argument("--order", type=int)
    common.add_argument("--tol", type=float)
    common.add_argument("--json", help="write the reports to this path")
    common.add_argument("--threads", type=int, default=1)

    parser = argparse.ArgumentParser(prog="enriques-phi", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="run identity checks")
    v.add_argument("check", choices=VERIFY_CHECKS + ("all",))
    q = sub.add_parser("qexp", parents=[common], help="exact leading expansion")
    q.add_argument("what", choices=("phi",))
    q.add_argument("--gamma", required=True)
    e = sub.add_parser("eval", parents=[common], help="evaluate one function")
    e.add_argument("function", choices=("phi1", "phi2", "j", "eta", "lambda", "weber"))
    e.add_argument("--at", required=True)
    lat = sub.add_parser("lattice", parents=[common], help="lattice data")
    lat.add_argument("what", choices=("info",))
    lat.add_argument("--name", required=True, choices=LATTICE_NAMES)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "qexp":
            return _cmd_qexp(args)
        if args.command == "eval":
            return _cmd_eval(args)
        return _cmd_lattice(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
