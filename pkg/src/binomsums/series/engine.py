"""Certified high-precision evaluation of the series families.

``evaluate`` sums the first K0 terms directly and replaces the rest by the
Euler-Maclaurin sum of the kernel's large-k expansion; a second run with
2*K0 terms and two more expansion orders certifies the first.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import mpmath

from ..numerics import PrecisionContext, Rational, Real, to_mpf
from .fixedpoint import head_sums, spare_bits
from .kernels import Kernel, SeriesFamily, as_kernel

# the smooth kernels are decreasing and their expansions accurate from here on
BRACKET_START = 1000


@dataclass(frozen=True)
class EvalOptions:
    cutoff: int = 10_000
    em_order: int = 12
    tol: object = None  # mpf/float/str; None means 10^-(digits-5)

    def __post_init__(self):
        if self.cutoff < 100:
            raise ValueError("cutoff must be >= 100")
        if self.em_order < 2:
            raise ValueError("em_order must be >= 2")

    def tolerance(self, ctx: PrecisionContext) -> mpmath.mpf:
        with ctx.workdps():
            return ctx.default_tol() if self.tol is None else mpmath.mpf(self.tol)


@dataclass(frozen=True)
class EvalResult:
    value: Real
    terms_used: int
    tail_estimate: Real
    converged: bool
    self_error: Real
    reason: str = ""


class NonConvergenceError(ArithmeticError):
    def __init__(self, spec, result: "EvalResult"):
        self.spec = spec
        self.result = result
        super().__init__(f"{spec}: {result.reason}")


def evaluate_strict(spec, ctx: PrecisionContext | None = None, opts: EvalOptions | None = None) -> Real:
    """Value of ``evaluate``; raises NonConvergenceError instead of flagging."""
    res = evaluate(spec, ctx, opts)
    if not res.converged:
        raise NonConvergenceError(spec, res)
    return res.value


def term(spec, k: int) -> Rational:
    return as_kernel(spec).term(k)


def partial_sum(spec, K: int) -> Rational:
    return as_kernel(spec).partial_sum(K)


def _fixed_to_mpf(x: int, bits: int, kernel: Kernel) -> mpmath.mpf:
    return mpmath.ldexp(mpmath.mpf(x), -bits) * to_mpf(kernel.scale)


@functools.lru_cache(maxsize=512)
def _two_runs(kernel: Kernel, ctx: PrecisionContext, K0: int, order: int):
    K1 = 2 * K0
    bits = ctx.bits + spare_bits(K1)
    h0, h1 = head_sums(kernel, [K0, K1], bits)
    with ctx.workdps():
        head0 = _fixed_to_mpf(h0, bits, kernel)
        head1 = _fixed_to_mpf(h1, bits, kernel)
        tail0 = kernel.expansion(order).tail(K0 + 1, order)
        tail1 = kernel.expansion(order + 2).tail(K1 + 1, order + 2)
        return head0 + tail0, head1 + tail1, tail1


def evaluate(spec, ctx: PrecisionContext | None = None, opts: EvalOptions | None = None) -> EvalResult:
    """Sum of the series to ``opts.tol``; non-convergence is reported, not raised."""
    ctx = ctx or PrecisionContext()
    opts = opts or EvalOptions()
    kernel = as_kernel(spec)
    if kernel.alternating:
        return evaluate_alternating(spec, ctx, opts)
    if kernel.decay <= 1:
        raise ValueError(f"series {spec} does not converge")
    v0, v1, tail = _two_runs(kernel, ctx, opts.cutoff, opts.em_order)
    tol = opts.tolerance(ctx)
    with ctx.workdps():
        err = abs(v1 - v0)
        ok = err <= tol
        reason = "" if ok else f"runs at K0={opts.cutoff} and {2 * opts.cutoff} differ by {mpmath.nstr(err, 5)}"
        return EvalResult(
            value=Real(v1, ctx),
            terms_used=2 * opts.cutoff,
            tail_estimate=Real(abs(tail), ctx),
            converged=bool(ok),
            self_error=Real(err, ctx),
            reason=reason,
        )


def _crvz(terms: list, n: int) -> mpmath.mpf:
    # Cohen-Rodriguez Villegas-Zagier acceleration of sum_{k>=0} (-1)^k a_k
    d = (3 + mpmath.sqrt(8)) ** n
    d = (d + 1 / d) / 2
    b = mpmath.mpf(-1)
    c = -d
    s = mpmath.mpf(0)
    for k in range(n):
        c = b - c
        s += c * terms[k]
        b = (k + n) * (k - n) * b / ((k + mpmath.mpf(1) / 2) * (k + 1))
    return s / d


def evaluate_alternating(spec, ctx: PrecisionContext | None = None, opts: EvalOptions | None = None) -> EvalResult:
    """Alternating series via the CRVZ transform, certified by doubling its order."""
    ctx = ctx or PrecisionContext()
    opts = opts or EvalOptions()
    kernel = as_kernel(spec)
    if not kernel.alternating:
        raise ValueError(f"{spec} is not an alternating family")
    # the transform gains log10(3 + sqrt 8) ~ 0.766 digits per term
    n = int(math.ceil(ctx.working / 0.766)) + 4
    tol = opts.tolerance(ctx)
    with ctx.workdps():
        a = [abs(to_mpf(kernel.term(k))) for k in range(1, 2 * n + 1)]
        r0 = _crvz(a, n)
        r1 = _crvz(a, 2 * n)
        err = abs(r1 - r0)
        ok = err <= tol
        return EvalResult(
            value=Real(r1, ctx),
            terms_used=2 * n,
            tail_estimate=Real(abs(r1 - mpmath.fsum((-1) ** k * a[k] for k in range(2 * n))), ctx),
            converged=bool(ok),
            self_error=Real(err, ctx),
            reason="" if ok else f"transform orders {n} and {2 * n} differ by {mpmath.nstr(err, 5)}",
        )


def tail_bracket(spec, K: int, ctx: PrecisionContext | None = None) -> tuple[Real, Real]:
    """Bounds lo <= sum_{k>K} term(k) <= hi by integral comparison.

    Terms K+1..max(K, BRACKET_START) are summed directly; beyond that the
    decreasing smooth extension of the kernel is integrated, giving
    int_{N+1}^inf f <= sum_{k>N} f(k) <= int_N^inf f.
    """
    ctx = ctx or PrecisionContext()
    kernel = as_kernel(spec)
    if kernel.alternating:
        raise ValueError("tail_bracket needs a positive, eventually decreasing kernel")
    if K < 0:
        raise ValueError("K must be >= 0")
    N = max(K, BRACKET_START)
    bits = ctx.bits + spare_bits(N)
    with ctx.workdps():
        if N > K:
            lo_head, hi_head = head_sums(kernel, [K, N], bits)
            explicit = _fixed_to_mpf(hi_head - lo_head, bits, kernel)
        else:
            explicit = mpmath.mpf(0)
        exp = kernel.expansion(20)
        lo = explicit + exp.integral(N + 1)
        hi = explicit + exp.integral(N)
        return Real(lo, ctx), Real(hi, ctx)


def family(tag: str, n: int | None = None) -> SeriesFamily:
    return SeriesFamily(tag, n)
