"""``defml`` command line: coeffs, verify, zeros, quad.

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 numeric non-convergence.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import re
import sys
from fractions import Fraction

from . import __version__, analysis, verify
from .families import FamilyKind, family, g_by_genfun, phi_by_genfun, phi_monic_genfun, to_monic
from .kernels import BACKEND, EigenConvergenceError
from .report import fmt_number

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NONCONV = 0, 1, 2, 3

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")

log = logging.getLogger("defml")


class UsageError(Exception):
    pass


def parse_h(text: str, *, allow_float: bool, allow_sym: bool = True):
    """``"sym"`` -> None, ``"3/2"`` -> Fraction, ``"0.25"`` -> float when allowed."""
    t = text.strip()
    if t == "sym":
        if not allow_sym:
            raise UsageError("this command needs a numeric h")
        return None
    if _RATIONAL.match(t):
        try:
            return Fraction(t)
        except ZeroDivisionError:
            raise UsageError(f"invalid h literal {text!r}") from None
    if allow_float:
        try:
            return float(t)
        except ValueError:
            pass
    raise UsageError(f"invalid h literal {text!r}")


def parse_h_list(items: list[str], *, allow_float: bool):
    out = []
    for item in items:
        for part in item.split(","):
            if part.strip():
                out.append(parse_h(part, allow_float=allow_float))
    if any(h is None for h in out):
        if len(out) > 1:
            raise UsageError("'sym' cannot be mixed with numeric h values")
        return None
    return out


def _h_param(h):
    return "sym" if h is None else fmt_number(h)


# output -------------------------------------------------------------------------

def document(command: str, params: dict, provenance, rows: list[dict], **extra) -> dict:
    doc = {
        "tool": "defml",
        "version": __version__,
        "command": command,
        "params": params,
        "provenance": provenance,
        "rows": rows,
    }
    doc.update(extra)
    return doc


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    rows = doc["rows"]
    cols: list[str] = []
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_csv_cell(r.get(c)) for c in cols])
    return buf.getvalue()


def _emit(doc: dict, args) -> None:
    text = render(doc, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# commands -----------------------------------------------------------------------

_ORACLES = {
    FamilyKind.G: g_by_genfun,
    FamilyKind.PHI: phi_by_genfun,
    FamilyKind.PHI_MONIC: phi_monic_genfun,
    FamilyKind.G_MONIC: lambda n: to_monic(g_by_genfun(n)),
}


def cmd_coeffs(args) -> int:
    kind = FamilyKind.parse(args.family)
    h = parse_h(args.h, allow_float=False)
    if args.n < 0:
        raise UsageError("--n must be non-negative")
    seq = family(kind, args.n)
    oracle = _ORACLES[kind](args.n)
    agree = seq.members == oracle.members
    rows = []
    for n, p in enumerate(seq.members):
        q = p if h is None else p.specialize_h(h)
        for a in range(q.deg_y, -1, -1):
            c = q.y_coeff(a)
            if c:
                rows.append({"n": n, "y_power": a, "coeff": str(c)})
    _emit(document(
        "coeffs",
        {"family": kind.value, "n": args.n, "h": _h_param(h)},
        {"members": seq.provenance, "oracle": oracle.provenance, "oracle_agrees": agree},
        rows,
    ), args)
    if not agree:
        print("coefficient oracle disagrees with the recurrence", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_verify(args) -> int:
    hs = parse_h_list(args.h, allow_float=args.suite in verify.NUMERIC_SUITES)
    if not args.tol > 0:
        raise UsageError("--tol must be positive")
    reports = verify.run(args.suite, n_max=args.n, hs=hs, tol=args.tol, seed=args.seed,
                         order=args.order)
    rows = []
    for r in reports:
        d = r.to_dict()
        if args.format == "csv":
            params = d.pop("params")
            d = {"identity": d.pop("identity"), **{f"param_{k}": v for k, v in params.items()}, **d}
        rows.append(d)
    ok = all(r.passed for r in reports)
    _emit(document(
        "verify",
        {"suite": args.suite, "n": args.n, "h": "sym" if hs is None else [_h_param(h) for h in hs],
         "tol": args.tol, "seed": args.seed},
        {"backend": BACKEND},
        rows,
        passed=ok,
    ), args)
    for line in _orthogonality_summary(reports):
        print(line, file=sys.stderr)
    if not ok:
        first = next(r for r in reports if not r.passed)
        print(f"FAIL {first.identity} {first.params} measured={first.measured} "
              f"claimed={first.claimed_derived} {first.detail}".rstrip(), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _orthogonality_summary(reports) -> list[str]:
    lines = []
    groups: dict[tuple[str, float], set[str]] = {}
    for r in reports:
        if r.identity.endswith("orthogonality-diagonal"):
            groups.setdefault((r.identity, r.params["h"]), set()).add(r.matched or "none")
    for (ident, h), matched in groups.items():
        printed = all(m in ("paper", "both") for m in matched)
        derived = all(m in ("derived", "both") for m in matched)
        lines.append(f"{ident} h={h}: derived constant {'matches' if derived else 'MISMATCH'}, "
                     f"printed constant (claimed_paper) {'matches' if printed else 'MISMATCH'}")
    return lines


def cmd_zeros(args) -> int:
    kind = FamilyKind.parse(args.family)
    if kind not in (FamilyKind.PHI_MONIC, FamilyKind.G):
        raise UsageError("zeros supports --family phi-monic or g")
    h = parse_h(args.h, allow_float=True, allow_sym=False)
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    if not h > 0:
        raise UsageError("zeros needs h > 0")
    member = family(kind, args.n)[args.n]
    rows = []
    if kind is FamilyKind.PHI_MONIC:
        zs = analysis.phi_zeros(args.n, h)
        for i, z in enumerate(zs):
            res = analysis.scaled_residual(member, float(z), h)
            rows.append({"index": i, "re": float(z), "im": 0.0, "residual": res})
    else:
        zs = analysis.g_zeros(args.n, h)
        for i, z in enumerate(zs):
            res = analysis.scaled_residual(member, complex(z), h)
            rows.append({"index": i, "re": float(z.real), "im": float(z.imag), "residual": res})
    ok = all(r["residual"] <= args.tol for r in rows)
    _emit(document(
        "zeros",
        {"family": kind.value, "n": args.n, "h": _h_param(h), "tol": args.tol},
        {"zeros": "jacobi-ql", "residual": "exact-polynomial-mp"},
        rows,
        passed=ok,
    ), args)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_quad(args) -> int:
    h = parse_h(args.h, allow_float=True, allow_sym=False)
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    if not h > 0:
        raise UsageError("quad needs h > 0")
    rule = analysis.gauss_rule(args.n, h)
    rows = [{"record": "node", "index": i, "node": float(x), "weight": float(w)}
            for i, (x, w) in enumerate(zip(rule.nodes, rule.weights))]
    deg = 2 * args.n - 1 if args.check_degree is None else args.check_degree
    ok = True
    for k in range(deg + 1):
        measured = rule.moment(k)
        claimed = analysis.weight_moment(k, h)
        dev = abs(measured - claimed)
        passed = dev <= args.tol * (abs(claimed) if claimed else 1.0)
        ok &= passed
        rows.append({"record": "moment", "k": k, "measured": measured, "claimed": claimed,
                     "abs_dev": dev, "pass": passed})
    _emit(document(
        "quad",
        {"n": args.n, "h": _h_param(h), "check_degree": deg, "tol": args.tol},
        {"rule": "golub-welsch-ql", "moments": "closed-form"},
        rows,
        passed=ok,
    ), args)
    return EXIT_OK if ok else EXIT_FAIL


# parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", default="g", help="g | g-monic | phi | phi-monic")
    common.add_argument("--n", type=int, default=20)
    common.add_argument("--h", action="append", default=None,
                        help="rational literal like 3/2, or 'sym'; verify accepts a list")
    common.add_argument("--tol", type=float, default=1e-8)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None, help="write output here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="defml", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"defml {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("coeffs", parents=[common], help="coefficient table of a family")
    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("--suite", choices=verify.SUITES + ("all",), default="all")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--order", type=int, default=None, help="series order for the genfun suite")
    sub.add_parser("zeros", parents=[common], help="zeros of phi-monic or g")
    q = sub.add_parser("quad", parents=[common], help="Gauss rule for y/sinh(pi y/h)")
    q.add_argument("--check-degree", type=int, default=None)
    return p


_DEFAULT_H = {"coeffs": "sym", "verify": "sym", "zeros": "1", "quad": "1"}
_COMMANDS = {"coeffs": cmd_coeffs, "verify": cmd_verify, "zeros": cmd_zeros, "quad": cmd_quad}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.h is None:
        args.h = [_DEFAULT_H[args.command]]
    if args.command != "verify":
        if len(args.h) != 1:
            parser.error("--h may be given once for this command")
        args.h = args.h[0]
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"defml: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        parser.print_usage(sys.stderr)
        print(f"defml: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (analysis.NonConvergenceError, EigenConvergenceError) as exc:
        print(f"defml: numeric non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONV


if __name__ == "__main__":
    sys.exit(main())
