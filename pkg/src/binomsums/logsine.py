"""Log-sine moments by tanh-sinh quadrature.

    M_n = int_0^{pi/2} (ln sin x)^n dx

The integrand has a logarithmic singularity at 0.  Nodes are stored as the
distance to the nearer endpoint (as a fraction of the interval), so points
crowding the singularity are represented without cancellation and
``sin`` is evaluated on a small argument directly.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Callable

import mpmath

from .numerics import PrecisionContext, Real, const_ln2, const_pi, const_zeta
from .series.engine import evaluate_strict
from .series.kernels import SeriesFamily, Tag

_NODE_CACHE: dict = {}
_NODE_LOCK = threading.Lock()


class QuadratureError(ArithmeticError):
    def __init__(self, message: str, result: "LogSineResult"):
        self.result = result
        super().__init__(message)


@dataclass(frozen=True)
class QuadratureOptions:
    level: int = 12  # maximal doubling depth; step h = 2^-level
    ctx: PrecisionContext = field(default_factory=PrecisionContext)
    tol: object = None  # None means ctx.default_tol()

    def __post_init__(self):
        if self.level < 3:
            raise ValueError("level must be >= 3")

    def tolerance(self) -> mpmath.mpf:
        with self.ctx.workdps():
            return self.ctx.default_tol() if self.tol is None else mpmath.mpf(self.tol)


@dataclass(frozen=True)
class LogSineResult:
    value: Real
    levels_used: int
    self_error: Real
    converged: bool


def _nodes(level: int, dps: int) -> list:
    """New abscissas of ``level`` as (fraction from endpoint, weight) pairs.

    Level 0 holds t = 0, 1, 2, ...; level m >= 1 holds the odd multiples of
    2^-m.  For t >= 0, a node at fraction f from the left endpoint is
    mirrored at fraction f from the right one.  The interval length and
    the step h are applied by the caller.
    """
    key = (level, dps)
    nodes = _NODE_CACHE.get(key)
    if nodes is not None:
        return nodes
    with mpmath.workdps(dps):
        # beyond t_max the nodes sit within 10^-(2 dps) of the endpoints
        t_max = math.asinh(2 * (2 * dps * math.log(10) / 2) / math.pi) + 0.5
        h = mpmath.mpf(2) ** -level
        halfpi = mpmath.pi / 2
        nodes = []
        j = 0 if level == 0 else 1
        step = 1 if level == 0 else 2
        while j * float(h) <= t_max:
            t = j * h
            u = halfpi * mpmath.sinh(t)
            e = mpmath.exp(-2 * u)
            frac = e / (1 + e)  # (1 - tanh u) / 2
            w = halfpi * mpmath.cosh(t) * 4 * e / (1 + e) ** 2  # pi/2 cosh t / cosh^2 u
            nodes.append((j == 0, frac, w))
            j += step
    with _NODE_LOCK:
        _NODE_CACHE.setdefault(key, nodes)
    return _NODE_CACHE[key]


def tanh_sinh(
    f: Callable[[mpmath.mpf, mpmath.mpf], mpmath.mpf],
    a,
    b,
    opts: QuadratureOptions,
) -> LogSineResult:
    """int_a^b of f, where f(dl, dr) receives the distances to a and to b.

    ``a`` and ``b`` may be zero-argument callables, evaluated at the working
    precision (so that e.g. pi/2 is not rounded to double first).
    """
    ctx = opts.ctx
    tol = opts.tolerance()
    dps = ctx.working + 5
    with mpmath.workdps(dps):
        a = mpmath.mpf(a() if callable(a) else a)
        b = mpmath.mpf(b() if callable(b) else b)
        length = b - a
        half = length / 2

        def level_sum(level):
            s = mpmath.mpf(0)
            for centre, frac, w in _nodes(level, dps):
                dl = length * frac
                if centre:
                    s += w * f(half, half)
                else:
                    s += w * (f(dl, length - dl) + f(length - dl, dl))
            return s

        raw = level_sum(0)
        estimate = half * raw
        err = mpmath.inf
        used = 0
        for level in range(1, opts.level + 1):
            raw = raw + level_sum(level)
            new = half * raw * mpmath.mpf(2) ** -level
            err = abs(new - estimate)
            estimate = new
            used = level
            if level >= 3 and err <= tol:
                break
    with ctx.workdps():
        return LogSineResult(Real(+estimate, ctx), used, Real(+err, ctx), bool(err <= tol))


def log_sin_moment(n: int, opts: QuadratureOptions | None = None) -> LogSineResult:
    """int_0^{pi/2} (ln sin x)^n dx."""
    if n < 0:
        raise ValueError("n must be >= 0")
    opts = opts or QuadratureOptions()
    if n == 0:
        with opts.ctx.workdps():
            return LogSineResult(Real(mpmath.pi / 2, opts.ctx), 0, Real(mpmath.mpf(0), opts.ctx), True)

    def f(dl, dr):
        # near pi/2, sin x = cos(pi/2 - x)
        s = mpmath.sin(dl) if dl <= dr else mpmath.cos(dr)
        return mpmath.log(s) ** n

    return tanh_sinh(f, 0, _half_pi, opts)


def _half_pi():
    return mpmath.pi / 2


def _pi():
    return +mpmath.pi


def _checked(res: LogSineResult, what: str) -> Real:
    if not res.converged:
        raise QuadratureError(f"{what}: quadrature did not converge (error {res.self_error})", res)
    return res.value


def theorem1_residual(n: int, ctx: PrecisionContext | None = None) -> Real:
    """|(-1)^n/n! M_n - 1 - sum_k c_k/(2k+1)^(n+1)|."""
    if n < 1:
        raise ValueError("n must be >= 1")
    ctx = ctx or PrecisionContext()
    moment = _checked(log_sin_moment(n, QuadratureOptions(ctx=ctx)), f"moment {n}")
    series = evaluate_strict(SeriesFamily(Tag.L, n + 1), ctx)
    lhs = moment * ((-1) ** n) / math.factorial(n) - 1
    return abs(lhs - series)


def ls4_stages(ctx: PrecisionContext | None = None) -> dict[str, Real]:
    """Routes to Ls_4(pi) = -int_0^pi ln^3(2 sin(x/2)) dx, each as a value of Ls_4(pi)."""
    ctx = ctx or PrecisionContext()
    opts = QuadratureOptions(ctx=ctx)
    pi, ln2, z3 = const_pi(ctx), const_ln2(ctx), const_zeta(3, ctx)

    def full(dl, dr):
        # x = dl on [0, pi]; near pi, sin(x/2) = cos((pi - x)/2)
        s = mpmath.sin(dl / 2) if dl <= dr else mpmath.cos(dr / 2)
        return mpmath.log(2 * s) ** 3

    def halved(dl, dr):
        s = mpmath.sin(dl) if dl <= dr else mpmath.cos(dr)
        return mpmath.log(2 * s) ** 3

    direct = -_checked(tanh_sinh(full, 0, _pi, opts), "Ls4 direct")
    substituted = -2 * _checked(tanh_sinh(halved, 0, _half_pi, opts), "Ls4 substituted")
    moments = [_checked(log_sin_moment(j, opts), f"moment {j}") for j in range(4)]
    binomial = -2 * sum(math.comb(3, j) * ln2 ** (3 - j) * moments[j] for j in range(4))
    # M_3 in closed form, pushed through the same binomial expansion
    m3 = -pi * z3 * 3 / 4 - pi**3 / 8 * ln2 - pi / 2 * ln2**3
    closed_m3 = -2 * (sum(math.comb(3, j) * ln2 ** (3 - j) * moments[j] for j in range(3)) + m3)
    return {
        "closed": pi * z3 * 3 / 2,
        "direct": direct,
        "substituted": substituted,
        "binomial": binomial,
        "closed_m3": closed_m3,
    }


def ls4_check(ctx: PrecisionContext | None = None) -> Real:
    """Largest deviation of any route from (3/2) pi zeta(3)."""
    ctx = ctx or PrecisionContext()
    stages = ls4_stages(ctx)
    ref = stages["closed"]
    with ctx.workdps():
        return Real(max(abs((v - ref).value) for k, v in stages.items() if k != "closed"), ctx)
