"""Batch verification: one record per check, a deterministic report."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable

import mpmath

from . import __version__
from .catalog import CatalogLookupError, catalog_all, catalog_get
from .closedform import ClosedForm, cf_evaluate, cf_format, cf_parse
from .identities import (
    ConvolutionId,
    antisymmetric_double_sum,
    convolution_stages,
    finite_binom_sum,
    lemma1_f,
    lemma1_problem,
    lemma2_oracle,
    lemma3_g,
    lemma3_problem,
    lemma4_oracle,
    lemma4_problem,
    lemma4_rhs,
    odd_partial_fraction,
    partial_fraction_check,
    recurrence_residual,
    solve_first_order,
)
from .logsine import QuadratureError, QuadratureOptions, log_sin_moment, ls4_stages
from .numerics import PrecisionContext, Real, constant_crosschecks
from .relations import RelationId, relation_sides
from .series.engine import EvalOptions, NonConvergenceError, evaluate, evaluate_strict
from .series.kernels import SeriesFamily, Tag

LEMMA_EXACT_K = 2000
LEMMA_ORACLE_K = 20


@dataclass
class VerificationRecord:
    target: str
    kind: str
    digits: int
    terms_used: int = 0
    numeric_value: str = ""
    closed_form: str = ""
    closed_form_value: str = ""
    abs_error: str = ""
    tol: str = ""
    passed: bool = False
    disputed: bool = False
    converged: bool = True
    reason: str = ""
    elapsed_ms: int = 0

    def as_dict(self, timing: bool = True) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        if not timing:
            d.pop("elapsed_ms")
        return d


@dataclass
class Report:
    config: dict
    records: list = field(default_factory=list)

    @property
    def summary(self) -> dict:
        return {
            "pass": sum(1 for r in self.records if r.passed and not r.disputed),
            "fail": sum(1 for r in self.records if not r.passed and not r.disputed),
            "disputed": sum(1 for r in self.records if r.disputed),
        }

    @property
    def nonconverged(self) -> bool:
        return any(not r.converged for r in self.records)

    def exit_code(self) -> int:
        if self.nonconverged:
            return 3
        return 1 if self.summary["fail"] else 0


# ---------------------------------------------------------------------------
# targets

def all_targets() -> list[str]:
    out = [str(e.family) for e in catalog_all()]
    out += [f"conv:{c.value}" for c in ConvolutionId]
    out += [f"rel:{r.value}" for r in RelationId]
    out += [f"thm1:{n}" for n in range(1, 6)]
    out += ["ls4"]
    out += [f"lemma:{i}" for i in range(1, 5)]
    out += ["identity:finite_sum", "identity:partial_fractions", "identity:antisymmetry"]
    out += ["constants"]
    return out


def load_disputed(path) -> set[str]:
    """Targets listed one per line ('family:n' or any target id); '#' comments."""
    out = set()
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            line = str(SeriesFamily.parse(line))
        except ValueError:
            pass
        out.add(line)
    return out


def _fmt(x, digits: int) -> str:
    if isinstance(x, Real):
        return x.decimal(digits)
    return mpmath.nstr(x, digits)


def _err(x) -> str:
    v = x.value if isinstance(x, Real) else x
    return "0" if v == 0 else mpmath.nstr(v, 6)


def _max_dev(pairs) -> mpmath.mpf:
    return max((abs(a.value - b.value) for a, b in pairs), default=mpmath.mpf(0))


def _verify_catalog(rec, target, ctx, tol, opts, override):
    entry = catalog_get(target)
    cf = entry.closed_form if override is None else override
    res = evaluate(entry.family, ctx, opts)
    closed = cf_evaluate(cf, ctx)
    rec.terms_used = res.terms_used
    rec.numeric_value = _fmt(res.value, ctx.digits)
    rec.closed_form = cf_format(cf)
    rec.closed_form_value = _fmt(closed, ctx.digits)
    rec.converged = res.converged
    if not res.converged:
        rec.reason = res.reason
    rec.disputed = rec.disputed or entry.disputed
    with ctx.workdps():
        return abs(res.value.value - closed.value)


def _verify_stages(rec, stages: dict, ctx, ref_key=None):
    items = list(stages.items())
    first = items[0][1]
    rec.numeric_value = _fmt(first, ctx.digits)
    if ref_key and ref_key in stages:
        rec.closed_form_value = _fmt(stages[ref_key], ctx.digits)
    with ctx.workdps():
        return _max_dev((first, v) for _, v in items[1:])


def _verify_lemma(rec, which: int, ctx):
    if which == 2:
        errs = [lemma2_oracle(k, ctx).value for k in range(1, LEMMA_ORACLE_K + 1)]
        rec.closed_form = "sum_i c_i/(i+k)^2, k=1..%d" % LEMMA_ORACLE_K
        return max(errs)
    problem = {1: lemma1_problem, 3: lemma3_problem, 4: lemma4_problem}[which]()
    closed = {1: lemma1_f, 3: lemma3_g, 4: lemma4_rhs}[which]
    K = LEMMA_EXACT_K
    solved = solve_first_order(problem, K)
    closed_vals = [closed(k) for k in range(1, K + 1)]
    # the solver must reproduce the closed form, and the closed form must
    # satisfy the recurrence with identically zero residual
    bad = sum(1 for v, c in zip(solved, closed_vals) if not (v - c).is_zero())
    bad += sum(1 for k in range(2, K + 1) if not recurrence_residual(problem, closed_vals, k).is_zero())
    rec.terms_used = K
    rec.closed_form = f"recurrence vs closed form, k=1..{K}"
    err = mpmath.mpf(bad)
    if which == 4:
        rec.closed_form += f"; series oracle k=1..{LEMMA_ORACLE_K // 4}"
        err = max(err, max(lemma4_oracle(k, ctx).value for k in range(1, LEMMA_ORACLE_K // 4 + 1)))
    return err


def _verify_identity(rec, which: str):
    bad = 0
    if which == "finite_sum":
        for k in range(0, 201):
            finite_binom_sum(k)
        rec.terms_used = 200
    elif which == "partial_fractions":
        grid = [(i, k) for i in range(1, 41) for k in range(1, 41)]
        grid += [(999_983, 1), (1, 999_983), (123_457, 654_321), (10**6, 10**6)]
        bad = sum(1 for i, k in grid if not partial_fraction_check(i, k))
        for i in range(1, 8):
            odd_partial_fraction(i, 64)
        rec.terms_used = len(grid)
    elif which == "antisymmetry":
        bad = 0 if antisymmetric_double_sum(40) == 0 else 1
        rec.terms_used = 40 * 40
    else:
        raise ValueError(f"unknown identity check {which!r}")
    rec.closed_form = "exact"
    return mpmath.mpf(bad)


def verify_entry(
    target: str,
    ctx: PrecisionContext | None = None,
    tol=None,
    *,
    opts: EvalOptions | None = None,
    disputed: Iterable[str] = (),
    closed_form_override: ClosedForm | str | None = None,
) -> VerificationRecord:
    """Run one check.  Non-convergence is recorded, never raised."""
    ctx = ctx or PrecisionContext()
    with ctx.workdps():
        tol_v = ctx.default_tol() if tol is None else mpmath.mpf(tol)
    opts = opts or EvalOptions(tol=tol_v)
    if isinstance(closed_form_override, str):
        closed_form_override = cf_parse(closed_form_override)
    kind, _, arg = target.partition(":")
    if kind in ("conv", "rel", "thm1", "lemma", "identity") or target in ("ls4", "constants"):
        norm = target
    else:
        kind = "catalog"
        norm = str(SeriesFamily.parse(target))
    rec = VerificationRecord(norm, kind, ctx.digits, tol=mpmath.nstr(tol_v, 6))
    rec.disputed = norm in set(disputed)
    t0 = time.perf_counter()
    try:
        if kind == "catalog":
            err = _verify_catalog(rec, norm, ctx, tol_v, opts, closed_form_override)
        elif kind == "conv":
            err = _verify_stages(rec, convolution_stages(arg, ctx), ctx, "closed")
            rec.closed_form = "stages agree"
        elif kind == "rel":
            sides = relation_sides(arg, ctx)
            rec.numeric_value = _fmt(sides[0][1], ctx.digits)
            rec.closed_form_value = _fmt(sides[0][2], ctx.digits)
            rec.closed_form = "lhs = rhs"
            with ctx.workdps():
                err = _max_dev((a, b) for _, a, b in sides)
        elif kind == "thm1":
            n = int(arg)
            res = log_sin_moment(n, QuadratureOptions(ctx=ctx, tol=tol_v / 100))
            if not res.converged:
                raise QuadratureError(f"moment {n} did not converge", res)
            lhs = res.value * ((-1) ** n) / math.factorial(n) - 1
            family = SeriesFamily(Tag.L, n + 1)
            series = evaluate_strict(family, ctx, opts)
            rec.numeric_value = _fmt(lhs, ctx.digits)
            rec.closed_form_value = _fmt(series, ctx.digits)
            rec.closed_form = cf_format(catalog_get(family).closed_form) if n + 1 <= 5 else ""
            rec.terms_used = opts.cutoff * 2
            with ctx.workdps():
                err = abs(lhs.value - series.value)
        elif kind == "ls4":
            err = _verify_stages(rec, ls4_stages(ctx), ctx, "closed")
            rec.closed_form = "3/2*pi*z3"
        elif kind == "lemma":
            err = _verify_lemma(rec, int(arg), ctx)
        elif kind == "identity":
            err = _verify_identity(rec, arg)
        elif kind == "constants":
            checks = constant_crosschecks(ctx)
            err = max(checks.values())
            rec.closed_form = ", ".join(sorted(checks))
        else:
            raise ValueError(f"unknown target {target!r}")
        with ctx.workdps():
            rec.abs_error = _err(err)
            rec.passed = bool(err <= tol_v) and rec.converged
    except (NonConvergenceError, QuadratureError) as exc:
        rec.converged = False
        rec.passed = False
        rec.reason = str(exc)
    except CatalogLookupError as exc:
        raise ValueError(str(exc)) from None
    rec.elapsed_ms = int(round((time.perf_counter() - t0) * 1000))
    return rec


def _run_one(args):
    target, ctx, tol, opts, disputed = args
    return verify_entry(target, ctx, tol, opts=opts, disputed=disputed)


def verify_all(
    ctx: PrecisionContext | None = None,
    tol=None,
    *,
    targets: Iterable[str] | None = None,
    opts: EvalOptions | None = None,
    disputed: Iterable[str] = (),
    jobs: int = 1,
) -> Report:
    """Every check (or ``targets``), in a fixed order regardless of ``jobs``.

    Parallel runs use processes: mpmath keeps its precision in a global
    context, so threads would interfere with each other.
    """
    ctx = ctx or PrecisionContext()
    targets = list(all_targets() if targets is None else targets)
    disputed = frozenset(disputed)
    with ctx.workdps():
        tol_v = ctx.default_tol() if tol is None else mpmath.mpf(tol)
    opts = opts or EvalOptions(tol=tol_v)
    work = [(t, ctx, str(tol_v), opts, disputed) for t in targets]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_one, work))
    else:
        records = [_run_one(w) for w in work]
    config = {
        "digits": ctx.digits,
        "guard": ctx.guard,
        "tol": mpmath.nstr(tol_v, 6),
        "K0": opts.cutoff,
        "em_order": opts.em_order,
        "targets": len(targets),
    }
    return Report(config, records)


# ---------------------------------------------------------------------------
# rendering

FIELDS = [
    "target", "kind", "digits", "terms_used", "numeric_value", "closed_form",
    "closed_form_value", "abs_error", "tol", "pass", "disputed", "converged",
    "reason", "elapsed_ms",
]


def report_dict(report: Report, timing: bool = True) -> dict:
    return {
        "config": {k: str(v) for k, v in report.config.items()},
        "records": [r.as_dict(timing) for r in report.records],
        "summary": report.summary,
        "version": __version__,
    }


def report_from_dict(data: dict) -> Report:
    records = []
    for d in data["records"]:
        d = dict(d)
        d["passed"] = d.pop("pass")
        records.append(VerificationRecord(**d))
    return Report(dict(data["config"]), records)


def render_report(report: Report, fmt: str = "text", timing: bool = True) -> bytes:
    if fmt == "json":
        return (json.dumps(report_dict(report, timing), indent=2) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        fields = FIELDS if timing else FIELDS[:-1]
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in report.records:
            w.writerow(r.as_dict(timing))
        return buf.getvalue().encode()
    if fmt == "text":
        lines = []
        for r in report.records:
            status = "DISPUTED" if r.disputed else ("PASS" if r.passed else "FAIL")
            line = f"{status:8} {r.target:28} err={r.abs_error or '-':>10}  tol={r.tol}"
            if r.reason:
                line += f"  ({r.reason})"
            lines.append(line)
        s = report.summary
        lines.append(f"{s['pass']} passed, {s['fail']} failed, {s['disputed']} disputed")
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown format {fmt!r}")
