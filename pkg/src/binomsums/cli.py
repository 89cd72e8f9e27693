"""Command-line interface.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage error,
3 an evaluation did not converge (takes priority over 1).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import mpmath

from .catalog import CatalogLookupError, catalog_get
from .closedform import ClosedFormSyntaxError, cf_evaluate, cf_format, cf_parse
from .harness import Report, all_targets, load_disputed, render_report, report_from_dict, verify_all
from .identities import (
    BasisValue,
    lemma1_f,
    lemma1_problem,
    lemma2_f,
    lemma2_oracle,
    lemma3_g,
    lemma3_problem,
    lemma4_problem,
    lemma4_rhs,
    solve_first_order,
)
from .logsine import QuadratureOptions, log_sin_moment, theorem1_residual
from .numerics import PrecisionContext
from .series.engine import EvalOptions, NonConvergenceError, evaluate
from .series.kernels import SeriesFamily, Tag

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NONCONV = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _digits(text: str) -> int:
    try:
        d = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if d < 10:
        raise argparse.ArgumentTypeError("--digits must be >= 10")
    return d


def _decimal(text: str) -> str:
    try:
        v = mpmath.mpf(text)
    except (ValueError, TypeError):
        raise argparse.ArgumentTypeError(f"not a decimal number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("--tol must be positive")
    return text


def _terms(text: str) -> int:
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if k < 100:
        raise argparse.ArgumentTypeError("--terms must be >= 100")
    return k


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--digits", type=_digits, default=30, help="decimal digits (>= 10)")
    shared.add_argument("--tol", type=_decimal, default=None, help="absolute tolerance (default 10^-(digits-5))")
    shared.add_argument("--terms", type=_terms, default=None, help="direct terms K0 before the tail (default 10000)")
    shared.add_argument("--format", choices=("text", "json", "csv"), default="text")

    p = argparse.ArgumentParser(prog="binomsums", description="Central binomial and odd harmonic series toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", parents=[shared], help="evaluate a series family")
    e.add_argument("--family", required=True, help="family tag, e.g. S, L, V, Z, W, LIN_h, HSQ_K3")
    e.add_argument("--n", type=int, default=None, help="order n for indexed families")

    c = sub.add_parser("closed-form", parents=[shared], help="show, parse or evaluate a closed form")
    c.add_argument("--family")
    c.add_argument("--n", type=int, default=None)
    c.add_argument("--parse", dest="expr", help="closed-form text to canonicalize and evaluate")

    v = sub.add_parser("verify", parents=[shared], help="verify catalog entries and identities")
    g = v.add_mutually_exclusive_group(required=True)
    g.add_argument("--all", action="store_true")
    g.add_argument("--target", action="append", help="target id (repeatable), e.g. S:4, conv:EQ22_25, thm1:2")
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--disputed", help="file listing disputed targets, one per line")
    v.add_argument("--output", help="also write the report to this file")

    lm = sub.add_parser("lemma", parents=[shared], help="check a lemma at index k")
    lm.add_argument("--id", required=True, choices=("1", "2", "3", "4"))
    lm.add_argument("--k", type=int, required=True)

    ls = sub.add_parser("logsine", parents=[shared], help="log-sine moments and their series identity")
    ls.add_argument("--n", type=int, required=True)
    ls.add_argument("--theorem1", action="store_true", help="also check the moment against its central-binomial series")

    r = sub.add_parser("report", parents=[shared], help="re-render a saved JSON report")
    r.add_argument("--input", required=True)
    return p


def _ctx(args) -> PrecisionContext:
    return PrecisionContext(args.digits)


def _opts(args) -> EvalOptions:
    kw = {}
    if args.terms is not None:
        kw["cutoff"] = args.terms
    if args.tol is not None:
        kw["tol"] = args.tol
    return EvalOptions(**kw)


def _family(args) -> SeriesFamily:
    try:
        if args.n is None:
            return SeriesFamily.parse(args.family)
        return SeriesFamily(Tag.parse(args.family), args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _emit(out, fmt: str, data: dict):
    if fmt == "json":
        out.write(json.dumps(data, indent=2) + "\n")
    elif fmt == "csv":
        out.write(",".join(data) + "\n")
        out.write(",".join(str(v) for v in data.values()) + "\n")
    else:
        width = max(len(k) for k in data)
        for k, v in data.items():
            out.write(f"{k:{width}}  {v}\n")


def cmd_eval(args, out) -> int:
    fam = _family(args)
    ctx = _ctx(args)
    opts = _opts(args)
    res = evaluate(fam, ctx, opts)
    data = {
        "family": str(fam),
        "digits": str(ctx.digits),
        "value": res.value.decimal(),
        "converged": str(res.converged).lower(),
        "self_error": mpmath.nstr(res.self_error.value, 6),
        "terms_used": str(res.terms_used),
    }
    code = EXIT_OK
    try:
        entry = catalog_get(fam)
    except CatalogLookupError:
        entry = None
    if entry is not None:
        closed = cf_evaluate(entry.closed_form, ctx)
        with ctx.workdps():
            err = abs(res.value.value - closed.value)
            tol = opts.tolerance(ctx)
        data["closed_form"] = cf_format(entry.closed_form)
        data["closed_form_value"] = closed.decimal()
        data["abs_error"] = mpmath.nstr(err, 6)
        if err > tol and not entry.disputed:
            code = EXIT_FAIL
    if not res.converged:
        data["reason"] = res.reason
        code = EXIT_NONCONV
    _emit(out, args.format, data)
    return code


def cmd_closed_form(args, out) -> int:
    ctx = _ctx(args)
    if args.expr is not None:
        try:
            cf = cf_parse(args.expr)
        except ClosedFormSyntaxError as exc:
            raise UsageError(f"{exc}\n  {args.expr}\n  {' ' * exc.position}^") from None
        data = {"closed_form": cf_format(cf), "value": cf_evaluate(cf, ctx).decimal()}
    elif args.family:
        fam = _family(args)
        try:
            entry = catalog_get(fam)
        except CatalogLookupError as exc:
            raise UsageError(str(exc)) from None
        data = {
            "family": str(fam),
            "closed_form": cf_format(entry.closed_form),
            "value": cf_evaluate(entry.closed_form, ctx).decimal(),
            "source": entry.source_label,
        }
    else:
        raise UsageError("closed-form needs --family or --parse")
    _emit(out, args.format, data)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    ctx = _ctx(args)
    opts = _opts(args)
    disputed = load_disputed(args.disputed) if args.disputed else set()
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    targets = None
    if args.target:
        targets = []
        for t in args.target:
            try:
                # validate early so a typo is a usage error, not a failed check
                verify_target_name(t)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
            targets.append(t)
    report = verify_all(ctx, args.tol, targets=targets, opts=opts, disputed=disputed, jobs=args.jobs)
    blob = render_report(report, args.format)
    out.write(blob.decode())
    if args.output:
        Path(args.output).write_bytes(blob)
    return report.exit_code()


def verify_target_name(t: str) -> str:
    known = set(all_targets())
    if t in known:
        return t
    fam = str(SeriesFamily.parse(t))
    if fam in known:
        return fam
    raise ValueError(f"unknown target {t!r}")


def cmd_lemma(args, out) -> int:
    k = args.k
    if k < 1:
        raise UsageError("--k must be >= 1")
    ctx = _ctx(args)
    which = int(args.id)
    data = {"lemma": args.id, "k": str(k)}
    code = EXIT_OK
    if which == 2:
        value = lemma2_f(k)
        try:
            err = lemma2_oracle(k, ctx)
        except NonConvergenceError as exc:
            data["reason"] = str(exc)
            _emit(out, args.format, data)
            return EXIT_NONCONV
        tol = _opts(args).tolerance(ctx)
        data["value"] = str(value)
        data["numeric"] = value.evaluate(ctx).decimal()
        data["residual"] = mpmath.nstr(err.value, 6)
        if err.value > tol:
            code = EXIT_FAIL
    else:
        problem = {1: lemma1_problem, 3: lemma3_problem, 4: lemma4_problem}[which]()
        closed = {1: lemma1_f, 3: lemma3_g, 4: lemma4_rhs}[which](k)
        solved = solve_first_order(problem, k)[-1]
        diff = solved - closed
        data["value"] = str(closed)
        data["numeric"] = BasisValue.coerce(closed).evaluate(ctx).decimal()
        data["residual"] = "exact" if diff.is_zero() else str(diff)
        if not diff.is_zero():
            code = EXIT_FAIL
    _emit(out, args.format, data)
    return code


def cmd_logsine(args, out) -> int:
    if args.n < 0:
        raise UsageError("--n must be >= 0")
    ctx = _ctx(args)
    opts = QuadratureOptions(ctx=ctx, tol=args.tol)
    res = log_sin_moment(args.n, opts)
    data = {
        "n": str(args.n),
        "value": res.value.decimal(),
        "levels_used": str(res.levels_used),
        "self_error": mpmath.nstr(res.self_error.value, 6),
        "converged": str(res.converged).lower(),
    }
    if not res.converged:
        _emit(out, args.format, data)
        return EXIT_NONCONV
    code = EXIT_OK
    if args.theorem1:
        if args.n < 1:
            raise UsageError("--theorem1 needs --n >= 1")
        try:
            err = theorem1_residual(args.n, ctx)
        except (NonConvergenceError, ArithmeticError) as exc:
            data["reason"] = str(exc)
            _emit(out, args.format, data)
            return EXIT_NONCONV
        data["theorem1_residual"] = mpmath.nstr(err.value, 6)
        if err.value > _opts(args).tolerance(ctx):
            code = EXIT_FAIL
    _emit(out, args.format, data)
    return code


def cmd_report(args, out) -> int:
    try:
        data = json.loads(Path(args.input).read_text())
        report: Report = report_from_dict(data)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read report {args.input}: {exc}") from None
    out.write(render_report(report, args.format).decode())
    return report.exit_code()


COMMANDS = {
    "eval": cmd_eval,
    "closed-form": cmd_closed_form,
    "verify": cmd_verify,
    "lemma": cmd_lemma,
    "logsine": cmd_logsine,
    "report": cmd_report,
}


def cli_main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"binomsums: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
