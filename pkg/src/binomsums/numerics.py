"""Exact sequence kernels, precision handling and the fundamental constants.

Everything exact is a ``gmpy2.mpq``; everything approximate is an ``mpmath.mpf``
carried together with the :class:`PrecisionContext` it was computed under.
"""

from __future__ import annotations

import functools
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import mpmath
import gmpy2
from gmpy2 import mpq, mpz

Rational = type(mpq())
RationalLike = Union[int, Fraction, Rational]

__all__ = [
    "PrecisionContext",
    "Real",
    "Rational",
    "SequenceTable",
    "central_ratio",
    "harmonic",
    "odd_harmonic",
    "const_pi",
    "const_ln2",
    "const_zeta",
    "const_li_half",
    "const_euler_gamma",
    "bernoulli",
    "to_mpf",
    "rational",
]


def rational(x: RationalLike) -> Rational:
    """Coerce an int/Fraction/mpq to ``mpq``."""
    if isinstance(x, Rational):
        return x
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, int):
        return mpq(x)
    raise TypeError(f"not an exact rational: {x!r}")


def to_mpf(x) -> mpmath.mpf:
    """Round an exact rational (or int/mpf) to the current mpmath precision."""
    if isinstance(x, mpmath.mpf):
        return +x
    if isinstance(x, (int, type(mpz()))):
        return mpmath.mpf(x)
    if isinstance(x, (Rational, Fraction)):
        p, q = x.numerator, x.denominator
        return mpmath.mpf(mpmath.libmp.from_rational(mpz(p), mpz(q), mpmath.mp.prec, "n"))
    return mpmath.mpf(x)


@dataclass(frozen=True)
class PrecisionContext:
    """Decimal working precision: ``digits`` promised, ``guard`` carried extra."""

    digits: int = 30
    guard: int = 10

    def __post_init__(self):
        if self.digits < 10:
            raise ValueError(f"digits must be >= 10, got {self.digits}")
        if self.guard < 5:
            raise ValueError(f"guard must be >= 5, got {self.guard}")

    @property
    def working(self) -> int:
        return self.digits + self.guard

    @property
    def bits(self) -> int:
        return int(math.ceil(self.working * math.log2(10))) + 8

    def workdps(self):
        return mpmath.workdps(self.working)

    def default_tol(self) -> mpmath.mpf:
        return mpmath.mpf(10) ** (-(self.digits - 5))

    def doubled(self) -> "PrecisionContext":
        return PrecisionContext(2 * self.digits, self.guard)


def _min_ctx(a: PrecisionContext, b: PrecisionContext) -> PrecisionContext:
    return a if a.digits <= b.digits else b


@dataclass(frozen=True)
class Real:
    """An mpf tagged with the context it is accurate for.

    Mixed-context arithmetic runs at the coarser of the two contexts and the
    result carries that context.
    """

    value: mpmath.mpf
    ctx: PrecisionContext

    def _coerce(self, other):
        if isinstance(other, Real):
            return _min_ctx(self.ctx, other.ctx), other.value
        if isinstance(other, (int, float, Fraction, Rational, mpmath.mpf)):
            return self.ctx, other
        return None, None

    def _op(self, other, fn):
        ctx, ov = self._coerce(other)
        if ctx is None:
            return NotImplemented
        with ctx.workdps():
            if isinstance(ov, (Fraction, Rational)):
                ov = to_mpf(ov)
            return Real(fn(self.value, ov), ctx)

    def __add__(self, other):
        return self._op(other, lambda a, b: a + b)

    def __radd__(self, other):
        return self._op(other, lambda a, b: b + a)

    def __sub__(self, other):
        return self._op(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._op(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._op(other, lambda a, b: a * b)

    def __rmul__(self, other):
        return self._op(other, lambda a, b: b * a)

    def __truediv__(self, other):
        return self._op(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._op(other, lambda a, b: b / a)

    def __pow__(self, n: int):
        with self.ctx.workdps():
            return Real(self.value**n, self.ctx)

    # unary minus and abs round to the ambient precision in mpmath
    def __neg__(self):
        with self.ctx.workdps():
            return Real(-self.value, self.ctx)

    def __abs__(self):
        with self.ctx.workdps():
            return Real(abs(self.value), self.ctx)

    def _cmp_value(self, other):
        if isinstance(other, Real):
            return other.value
        if isinstance(other, (Fraction, Rational)):
            with self.ctx.workdps():
                return to_mpf(other)
        return other

    def __lt__(self, other):
        return self.value < self._cmp_value(other)

    def __le__(self, other):
        return self.value <= self._cmp_value(other)

    def __gt__(self, other):
        return self.value > self._cmp_value(other)

    def __ge__(self, other):
        return self.value >= self._cmp_value(other)

    def __float__(self):
        return float(self.value)

    def decimal(self, digits: int | None = None) -> str:
        """Decimal string with ``digits`` significant digits (default ctx.digits)."""
        n = self.ctx.digits if digits is None else digits
        with self.ctx.workdps():
            return mpmath.nstr(self.value, n, min_fixed=-5, max_fixed=5)

    def __str__(self):
        return self.decimal()

    def agrees_with(self, other: "Real", digits: int) -> bool:
        """True when the two values agree to ``digits`` significant digits."""
        with _min_ctx(self.ctx, other.ctx).workdps():
            scale = max(abs(self.value), abs(other.value), mpmath.mpf(1) if self.value == 0 else 0)
            return abs(self.value - other.value) <= scale * mpmath.mpf(10) ** (-digits)


# ---------------------------------------------------------------------------
# exact sequences

_CACHE_LIMIT = 4096


class SequenceTable:
    """Append-only cache of c_k = C(2k,k)/4^k, H_k and h_k.

    Readers never see a partially extended table: growth happens under a lock
    and lists are only appended to.
    """

    def __init__(self):
        self.c: list[Rational] = [mpq(1)]
        self.H: list[Rational] = [mpq(0)]
        self.h: list[Rational] = [mpq(0)]
        self._lock = threading.Lock()

    @property
    def K(self) -> int:
        return len(self.h) - 1

    def ensure(self, K: int) -> "SequenceTable":
        if K <= self.K:
            return self
        with self._lock:
            # H is kept to 2K so that H_{2k} is available for every cached k
            c, H, h = self.c, self.H, self.h
            for k in range(len(c), K + 1):
                c.append(c[-1] * mpq(2 * k - 1, 2 * k))
            for k in range(len(H), 2 * K + 1):
                H.append(H[-1] + mpq(1, k))
            for k in range(len(h), K + 1):
                h.append(h[-1] + mpq(1, 2 * k - 1))
        return self


_TABLE = SequenceTable()


def sequence_table(K: int) -> SequenceTable:
    """The shared table, grown to at least ``K``."""
    return _TABLE.ensure(K)


def _harmonic_split(a: int, b: int, step: int = 1) -> tuple[mpz, mpz]:
    # sum_{i in [a, b) by step} 1/i as an unreduced p/q, by binary splitting
    n = (b - a + step - 1) // step
    if n <= 0:
        return mpz(0), mpz(1)
    if n <= 16:
        p, q = mpz(0), mpz(1)
        for i in range(a, b, step):
            p, q = p * i + q, q * i
        return p, q
    mid = a + (n // 2) * step
    p1, q1 = _harmonic_split(a, mid, step)
    p2, q2 = _harmonic_split(mid, b, step)
    return p1 * q2 + p2 * q1, q1 * q2


def central_ratio(k: int) -> Rational:
    """C(2k, k) / 4^k."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if k <= _CACHE_LIMIT:
        return sequence_table(k).c[k]
    return mpq(gmpy2.comb(2 * k, k), mpz(4) ** k)


def harmonic(k: int) -> Rational:
    if k < 0:
        raise ValueError("k must be >= 0")
    if k <= 2 * _CACHE_LIMIT:
        return sequence_table((k + 1) // 2).H[k]
    p, q = _harmonic_split(1, k + 1)
    return mpq(p, q)


def odd_harmonic(k: int) -> Rational:
    """h_k = 1 + 1/3 + ... + 1/(2k-1)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if k <= _CACHE_LIMIT:
        return sequence_table(k).h[k]
    p, q = _harmonic_split(1, 2 * k, 2)
    return mpq(p, q)


@functools.lru_cache(maxsize=None)
def bernoulli(n: int) -> Rational:
    """Bernoulli number B_n (B_1 = -1/2)."""
    p, q = mpmath.bernfrac(n)
    return mpq(p, q)


# ---------------------------------------------------------------------------
# constants

@functools.lru_cache(maxsize=256)
def _li_half_fixed(m: int, bits: int) -> int:
    # sum_{k<=bits} 2^{bits-k} / k^m; the dropped tail is below 2^{-bits}
    total = 0
    for k in range(1, bits + 1):
        total += (1 << (bits - k)) // k**m
    return total


def _li_half_mpf(m: int, ctx: PrecisionContext) -> mpmath.mpf:
    bits = ctx.bits + 16
    with ctx.workdps():
        return mpmath.ldexp(mpmath.mpf(_li_half_fixed(m, bits)), -bits)


def const_pi(ctx: PrecisionContext) -> Real:
    with ctx.workdps():
        return Real(+mpmath.pi, ctx)


def const_ln2(ctx: PrecisionContext) -> Real:
    with ctx.workdps():
        return Real(+mpmath.ln2, ctx)


def const_euler_gamma(ctx: PrecisionContext) -> Real:
    with ctx.workdps():
        return Real(+mpmath.euler, ctx)


def const_zeta(m: int, ctx: PrecisionContext) -> Real:
    if m < 2:
        raise ValueError(f"zeta({m}) is not finite; need m >= 2")
    with ctx.workdps():
        return Real(mpmath.zeta(m), ctx)


def const_li_half(m: int, ctx: PrecisionContext) -> Real:
    """Li_m(1/2) from its defining series (m = 1 gives ln 2)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return Real(_li_half_mpf(m, ctx), ctx)


# -- independent second routes, used for self-certification ------------------

def _arctan_inv_fixed(x: int, one: int) -> int:
    # arctan(1/x) * one by the Gregory series
    total, term, n, sign = 0, one // x, 1, 1
    x2 = x * x
    while term:
        total += sign * (term // n)
        term //= x2
        n += 2
        sign = -sign
    return total


def pi_machin(ctx: PrecisionContext) -> mpmath.mpf:
    bits = ctx.bits + 16
    one = 1 << bits
    v = 16 * _arctan_inv_fixed(5, one) - 4 * _arctan_inv_fixed(239, one)
    with ctx.workdps():
        return mpmath.ldexp(mpmath.mpf(v), -bits)


def ln2_atanh(ctx: PrecisionContext) -> mpmath.mpf:
    # ln 2 = 2 atanh(1/3)
    bits = ctx.bits + 16
    one = 1 << bits
    total, term, n = 0, one // 3, 1
    while term:
        total += term // n
        term //= 9
        n += 2
    with ctx.workdps():
        return mpmath.ldexp(mpmath.mpf(2 * total), -bits)


def zeta_even_bernoulli(m: int, ctx: PrecisionContext) -> mpmath.mpf:
    if m < 2 or m % 2:
        raise ValueError("even m >= 2 required")
    with ctx.workdps():
        b = to_mpf(bernoulli(m))
        return (-1) ** (m // 2 + 1) * b * (2 * pi_machin(ctx)) ** m / (2 * mpmath.factorial(m))


def constant_crosschecks(ctx: PrecisionContext) -> dict[str, mpmath.mpf]:
    """Absolute discrepancies between the primary and a second route per constant."""
    from .series.tails import zeta_direct

    out = {}
    with ctx.workdps():
        pi = const_pi(ctx).value
        ln2 = const_ln2(ctx).value
        out["pi"] = abs(pi - pi_machin(ctx))
        out["ln2"] = max(abs(ln2 - ln2_atanh(ctx)), abs(ln2 - _li_half_mpf(1, ctx)))
        for m in (2, 4, 6, 8):
            out[f"zeta({m})"] = abs(const_zeta(m, ctx).value - zeta_even_bernoulli(m, ctx))
        for m in (3, 5, 7):
            out[f"zeta({m})"] = abs(const_zeta(m, ctx).value - zeta_direct(m, ctx))
        out["Li2(1/2)"] = abs(_li_half_mpf(2, ctx) - (pi**2 / 12 - ln2**2 / 2))
        for m in (4, 5):
            out[f"Li{m}(1/2)"] = abs(_li_half_mpf(m, ctx) - mpmath.polylog(m, mpmath.mpf(1) / 2))
    return out
