"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 domain error, 3 tolerance not met or
a failing verification suite.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import catalog, ddcore, funcs, verify
from .errors import DomainError, ToleranceNotMet

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_TOLERANCE = 0, 1, 2, 3

DEFAULT_GRID_VALUES = (0.5, 1.5, 2.0, 3.0)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# ---------------------------------------------------------------------------
# argument parsing helpers


def parse_nodes(text):
    """``"1:2,2:1"`` -> [(1.0, 2), (2.0, 1)]; a bare value means multiplicity 1."""
    entries = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        val, _, mult = item.partition(":")
        try:
            entries.append((float(val), int(mult) if mult else 1))
        except ValueError as exc:
            raise UsageError(f"bad node entry {item!r}") from exc
    if not entries:
        raise UsageError("no nodes given")
    return entries


def _ints(text):
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def _floats(text):
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


def _function(name):
    try:
        return catalog.by_name(name)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def parse_grid(text):
    """``"2:3,0.5:1.5"`` -> [(2.0, 3.0), (0.5, 1.5)]."""
    pts = []
    for item in text.split(","):
        a, sep, b = item.partition(":")
        if not sep:
            raise UsageError(f"grid points are a:b pairs, got {item!r}")
        try:
            pts.append((float(a), float(b)))
        except ValueError as exc:
            raise UsageError(f"bad grid point {item!r}") from exc
    return pts


def default_grid():
    return [(a, b) for a in DEFAULT_GRID_VALUES for b in DEFAULT_GRID_VALUES if a != b]


def resolve_seed(seed):
    if seed is not None:
        return seed
    env = os.environ.get("DDCALC_SEED")
    if env is None or env == "":
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise UsageError(f"DDCALC_SEED must be an integer, got {env!r}") from exc


# ---------------------------------------------------------------------------
# output


def _json(payload):
    return json.dumps(payload, indent=2, sort_keys=True)


def _emit_value(args, command, value, extra=None):
    extra = extra or {}
    if args.format == "json":
        print(_json({"schema": 1, "status": "ok", "command": command, "value": value, **extra}))
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        keys = ["value"] + sorted(extra)
        w.writerow(keys)
        w.writerow([repr(value)] + [extra[k] for k in sorted(extra)])
        sys.stdout.write(buf.getvalue())
    else:
        print(repr(value))
        for k in sorted(extra):
            print(f"{k}: {extra[k]}")


# ---------------------------------------------------------------------------
# commands


def cmd_dd(args):
    entries = parse_nodes(args.nodes)
    f = _function(args.func)
    ns = ddcore.NodeSystem.from_entries(entries)
    value = ddcore.dd_confluent(ns, f)
    extra = {}
    if args.oracle == "hermite":
        ref = ddcore.dd_hermite_genocchi(ns, f)
    elif args.oracle == "contour":
        ref = ddcore.dd_contour(ns, f)
    else:
        ref = None
    if ref is not None:
        extra = {"oracle": args.oracle, "oracle_value": ref, "delta": abs(value - ref)}
    _emit_value(args, "dd", value, extra)
    return EXIT_OK


def cmd_hfun(args):
    value = funcs.h_func(_ints(args.alpha), _floats(args.s), args.m)
    _emit_value(args, "hfun", value)
    return EXIT_OK


def cmd_mfun(args):
    value = funcs.m_func(_ints(args.alpha), _floats(args.s), args.m)
    _emit_value(args, "mfun", value)
    return EXIT_OK


def cmd_hcm(args):
    idx = _ints(args.indices)
    if len(idx) != 3:
        raise UsageError("--indices takes three integers")
    value = funcs.hcm(*idx, args.a, args.b)
    extra = {}
    if args.check_closed_form:
        closed = funcs.hcm_closed_form(*idx, args.a, args.b)
        extra = {"closed_form": closed, "delta": abs(value - closed)}
    _emit_value(args, "hcm", value, extra)
    return EXIT_OK


def table_rows(points):
    rows = []
    for key in funcs.HCM_CLOSED_FORMS:
        for a, b in points:
            dd_val = funcs.hcm(*key, a, b)
            closed = funcs.hcm_closed_form(*key, a, b)
            rows.append({"function": "H^CM_{%d,%d,%d}" % key, "a": a, "b": b,
                         "dd_value": dd_val, "closed_form": closed,
                         "delta": abs(dd_val - closed)})
    return rows


def cmd_table(args):
    points = parse_grid(args.grid) if args.grid else default_grid()
    rows = table_rows(points)
    max_delta = max(r["delta"] for r in rows)
    if args.format == "json":
        print(_json({"schema": 1, "status": "ok", "command": "table", "rows": rows,
                     "max_delta": max_delta}))
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        cols = ["function", "a", "b", "dd_value", "closed_form", "delta"]
        w.writerow(cols)
        for r in rows:
            w.writerow([r["function"]] + [repr(r[c]) for c in cols[1:]])
        sys.stdout.write(buf.getvalue())
    else:
        print(f"{'function':<16}{'a':>6}{'b':>6}{'dd_value':>24}{'closed_form':>24}{'delta':>11}")
        for r in rows:
            print(f"{r['function']:<16}{r['a']:>6g}{r['b']:>6g}{r['dd_value']:>24.16g}"
                  f"{r['closed_form']:>24.16g}{r['delta']:>11.2e}")
        print(f"max delta: {max_delta:.3e}")
    return EXIT_OK


def cmd_verify(args):
    seed = resolve_seed(args.seed)
    if args.cases < 1 or args.dim < 1:
        raise UsageError("--cases and --dim must be positive")
    report = verify.run(args.suite, seed=seed, cases=args.cases, dim=args.dim)
    ok = report["status"] == "pass"
    if args.format == "json":
        print(_json(report))
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["suite", "case", "check", "lhs", "rhs", "delta", "tol", "passed"])
        for name, entry in report["suites"].items():
            for r in entry["records"]:
                w.writerow([name, r["case"], r["check"], r["lhs"], r["rhs"], r["delta"],
                            r["tol"], r["passed"]])
        sys.stdout.write(buf.getvalue())
    else:
        for name, entry in report["suites"].items():
            flag = "PASS" if entry["passed"] else "FAIL"
            md = entry["max_delta"]
            md = "n/a" if md is None else f"{md:.3e}"
            print(f"{flag}  {name:<14} checks={entry['checks']:<5} failures={entry['failures']:<4}"
                  f" max_delta={md}")
        print(f"status: {report['status']} (seed={seed})")
    return EXIT_OK if ok else EXIT_TOLERANCE


# ---------------------------------------------------------------------------


def build_parser():
    parser = _Parser(prog="ddcalc", description="Divided differences and related identities.")
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("pretty", "json", "csv"), default="pretty")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("dd", parents=[common], help="divided difference of a catalog function")
    p.add_argument("--nodes", required=True, help='entries "value:multiplicity,..."')
    p.add_argument("--func", required=True,
                   help="exp, log, idmlog:m, modlog:m, gaussian, poly:c0,c1,..., cosh, "
                        "power:z, bernoulli")
    p.add_argument("--oracle", choices=("hermite", "contour"))
    p.set_defaults(handler=cmd_dd)

    for name, handler, help_ in (("hfun", cmd_hfun, "H_alpha(s, m)"),
                                 ("mfun", cmd_mfun, "M_alpha(s, m)")):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--alpha", required=True, help="multi-index, e.g. 0,0")
        p.add_argument("--s", required=True, help="comma-separated positive arguments")
        p.add_argument("--m", type=int, default=0)
        p.set_defaults(handler=handler)

    p = sub.add_parser("hcm", parents=[common], help="two-variable H^CM_{i,j,k}(a, b)")
    p.add_argument("--indices", required=True, help="i,j,k")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--check-closed-form", action="store_true")
    p.set_defaults(handler=cmd_hcm)

    p = sub.add_parser("verify", parents=[common], help="run a seeded verification suite")
    p.add_argument("suite", choices=tuple(verify.SUITES) + ("all",))
    p.add_argument("--seed", type=int, default=None, help="defaults to $DDCALC_SEED, else 0")
    p.add_argument("--cases", type=int, default=20)
    p.add_argument("--dim", type=int, default=3)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("table", parents=[common], help="closed forms vs divided differences")
    p.add_argument("--grid", help='points "a:b,a:b,..."; default is a 4x4 off-diagonal grid')
    p.set_defaults(handler=cmd_table)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"ddcalc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"ddcalc: domain error: {exc}", file=sys.stderr)
        if args.format == "json":
            print(_json({"schema": 1, "status": "error", "error": "domain", "message": str(exc)}))
        return EXIT_DOMAIN
    except ToleranceNotMet as exc:
        print(f"ddcalc: tolerance not met: {exc}", file=sys.stderr)
        if args.format == "json":
            print(_json({"schema": 1, "status": "error", "error": "tolerance",
                         "message": str(exc)}))
        return EXIT_TOLERANCE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
