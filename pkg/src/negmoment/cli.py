"""Command-line entry point: verification suites and the moment experiment.

Every subcommand writes CSV or JSON to stdout (or --out) and exits 0 when all
rows pass, 1 when any row fails, 2 on usage or precondition errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from .characters import FundamentalDiscriminant
from .gauss import GAUSS_CSV_HEADER, gauss_records
from .lfunc import WORKERS_ENV, gauss_series_fe_case, completed_lambda_quadratic, default_workers
from .moment import (
    MomentConfig, MomentReport, WeightSpec, euler_product_P, moment_report, moment_row, residue_identity,
)
from .rep import REP_LABELS, coeff, get_rep

FE_HEADER = ["case_id", "n_or_d", "s_re", "s_im", "lhs_re", "lhs_im", "rhs_re", "rhs_im",
             "residual", "bound", "pass"]
MOMENT_HEADER = ["X", "lhs", "main", "ratio", "trunc_est"]

FE_DISCRIMINANTS = (5, 8, 12, 13, -3, -4, -7, -8)
FE_POINTS = (complex(-1), complex(0.25, 1), complex(0.5, 2.7), complex(2))
GAUSS_FE_MODULI = (5, 13, 17, 21, 45)
GAUSS_FE_POINTS = (complex(-1), complex(-1.5))


class UsageError(Exception):
    pass


def _number(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _integer(text: str) -> int:
    v = _number(text)
    if not math.isfinite(v) or v != int(v):
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(v)


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _number_list(text: str) -> list[float]:
    return [_number(t) for t in text.split(",") if t.strip()]


def _int_list(text: str) -> list[int]:
    return [_integer(t) for t in text.split(",") if t.strip()]


def _complex_list(text: str) -> list[complex]:
    return [_complex(t) for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="negmoment",
        description="Quadratic-twist L-function checks and the negative first moment.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, fmt="csv"):
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=fmt)

    p = sub.add_parser("verify-gauss", help="closed form vs brute force Gauss sums")
    p.add_argument("--nmax", type=_integer, default=315)
    p.add_argument("--qmax", type=_integer, default=315)
    p.add_argument("--tol", type=_number, default=1e-9, help="relative tolerance (default 1e-9)")
    common(p)

    p = sub.add_parser("verify-fe", help="symmetry of the completed quadratic L-function")
    p.add_argument("--d", type=_int_list, default=list(FE_DISCRIMINANTS),
                   help="comma-separated fundamental discriminants")
    p.add_argument("--s", type=_complex_list, default=list(FE_POINTS),
                   help="comma-separated points, e.g. -1,0.25+1j")
    p.add_argument("--tol", type=_number, default=1e-7, help="relative tolerance (default 1e-7)")
    common(p)

    p = sub.add_parser("verify-cech", help="functional equation through the Gauss-sum series")
    p.add_argument("--n", type=_int_list, default=list(GAUSS_FE_MODULI))
    p.add_argument("--s", type=_complex_list, default=list(GAUSS_FE_POINTS))
    p.add_argument("--q", type=_integer, default=10**6, help="series truncation Q")
    p.add_argument("--tol", type=_number, default=1e-6,
                   help="bound = tail bound + tol |L| (default 1e-6)")
    common(p)

    p = sub.add_parser("coeff", help="Dirichlet coefficient a(n) of 1/L(s, pi)")
    p.add_argument("--rep", choices=REP_LABELS, default="delta")
    p.add_argument("--n", type=_integer, required=True)

    p = sub.add_parser("euler-product", help="truncated P(z) and its tail bound")
    p.add_argument("--rep", choices=REP_LABELS, default="delta")
    p.add_argument("--z", type=_number, default=1.0)
    p.add_argument("--pmax", type=_integer, default=10**5)
    common(p)

    p = sub.add_parser("residue-check", help="square-sum side vs Euler product")
    p.add_argument("--rep", choices=REP_LABELS, default="delta")
    p.add_argument("--z", type=_number, default=1.0)
    p.add_argument("--mmax", type=_integer, default=10**6)
    p.add_argument("--tol", type=_number, default=None,
                   help="deviation tolerance (default: 10x the tail estimate)")
    common(p)

    for name, helptext in (("moment", "one moment evaluation"), ("sweep", "moment over several X")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--rep", choices=REP_LABELS, default="delta")
        p.add_argument("--alpha", type=_number, default=0.5)
        if name == "moment":
            p.add_argument("--x", type=_number, default=1e4)
            p.add_argument("--tol", type=_number, default=0.03,
                           help="pass when |ratio - 1| <= tol (default 0.03)")
        else:
            p.add_argument("--x-list", type=_number_list, default=[1e3, 3e3, 1e4, 3e4])
        p.add_argument("--k", type=_integer, default=None,
                       help="truncation K (default max(1e4, sqrt X))")
        p.add_argument("--weight", choices=("gaussian", "bump"), default="gaussian")
        p.add_argument("--chunk", type=_integer, default=4096, help="reduction chunk size")
        p.add_argument("--workers", type=_integer, default=None,
                       help=f"threads (default ${WORKERS_ENV} or 1)")
        common(p, fmt="json")
    return ap


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _table(args, header, rows) -> str:
    if args.format == "json":
        return json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n"
    return _csv(header, rows)


def cmd_verify_gauss(args) -> int:
    rows, ok = [], True
    for rec in gauss_records(args.nmax, args.qmax):
        good = rec.abs_err <= args.tol * max(1.0, abs(rec.direct))
        ok &= good
        rows.append(rec.row())
    _emit(_table(args, GAUSS_CSV_HEADER, rows), args.out)
    return 0 if ok else 1


def cmd_verify_fe(args) -> int:
    rows, ok = [], True
    for d in args.d:
        FundamentalDiscriminant(d)
        for i, s in enumerate(args.s):
            lhs = completed_lambda_quadratic(d, s)
            rhs = completed_lambda_quadratic(d, 1 - s)
            res = abs(lhs - rhs) / max(abs(lhs), 1e-300)
            good = res <= args.tol
            ok &= good
            rows.append([f"fe_d{d}_s{i}", d, s.real, s.imag, lhs.real, lhs.imag,
                         rhs.real, rhs.imag, res, args.tol, good])
    _emit(_table(args, FE_HEADER, rows), args.out)
    return 0 if ok else 1


def cmd_verify_gauss_series(args) -> int:
    rows, ok = [], True
    for n in args.n:
        for i, s in enumerate(args.s):
            c = gauss_series_fe_case(n, s, args.q)
            bound = c.tail_bound + args.tol * abs(c.lhs)
            good = c.residual <= bound
            ok &= good
            rows.append([f"gfe_n{n}_s{i}", n, s.real, s.imag, c.lhs.real, c.lhs.imag,
                         c.rhs.real, c.rhs.imag, c.residual, bound, good])
    _emit(_table(args, FE_HEADER, rows), args.out)
    return 0 if ok else 1


def cmd_coeff(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be positive")
    rep = get_rep(args.rep, max(args.n, 1000))
    sys.stdout.write(format(coeff(rep, args.n), ".17g") + "\n")
    return 0


def cmd_euler_product(args) -> int:
    rep = get_rep(args.rep, args.pmax)
    value, tail = euler_product_P(rep, args.z, args.pmax)
    _emit(_table(args, ["z", "Pmax", "value", "tail_bound"], [[args.z, args.pmax, value, tail]]),
          args.out)
    return 0


def cmd_residue_check(args) -> int:
    rep = get_rep(args.rep, max(args.mmax, 1000))
    r = residue_identity(rep, args.z, args.mmax)
    tol = args.tol if args.tol is not None else 10 * r.estimate
    good = r.deviation <= tol
    header = ["z", "Mmax", "lhs", "P", "deviation", "estimate", "bound", "pass"]
    _emit(_table(args, header, [[r.z, args.mmax, r.lhs, r.P, r.deviation, r.estimate, tol, good]]),
          args.out)
    return 0 if good else 1


def _report_text(args, report: MomentReport) -> str:
    if args.format == "json":
        return json.dumps(report.to_dict(), indent=2) + "\n"
    rows = [[r.X, r.lhs, r.main, r.ratio, r.trunc_est] for r in report.rows]
    return _csv(MOMENT_HEADER, rows)


def _workers(args) -> int:
    w = args.workers if args.workers is not None else default_workers()
    if w < 1:
        raise UsageError("--workers must be positive")
    return w


def cmd_moment(args) -> int:
    cfg = MomentConfig(args.rep, args.alpha, args.x, args.k, WeightSpec(args.weight), args.chunk)
    row = moment_row(cfg, _workers(args))
    good = abs(row.ratio - 1) <= args.tol
    report = MomentReport(cfg.rep, cfg.alpha, cfg.weight.kind, cfg.truncation, [row], None,
                          bool(good), cfg.mode)
    _emit(_report_text(args, report), args.out)
    return 0 if good else 1


def cmd_sweep(args) -> int:
    report = moment_report(args.rep, args.alpha, args.x_list, args.k, WeightSpec(args.weight),
                           _workers(args), args.chunk)
    _emit(_report_text(args, report), args.out)
    return 0 if report.passed else 1


COMMANDS = {
    "verify-gauss": cmd_verify_gauss,
    "verify-fe": cmd_verify_fe,
    "verify-cech": cmd_verify_gauss_series,
    "coeff": cmd_coeff,
    "euler-product": cmd_euler_product,
    "residue-check": cmd_residue_check,
    "moment": cmd_moment,
    "sweep": cmd_sweep,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else 0
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError, KeyError) as e:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
