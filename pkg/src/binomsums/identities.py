"""Exact lemma values, telescoping, and the convolution arguments behind the catalog.

Notation: c_k = C(2k,k)/4^k, H_k the harmonic and h_k the odd harmonic
numbers.  The four shifted series handled here are

    sum_i c_i/(i+k)        = 1/(k c_k) - 1/k
    sum_i c_i/(i+k)^2      = (1/k^2 - 2 ln2/k + 2h_k/k - H_k/k)/c_k - 1/k^2
    sum_i c_i/(2i+2j-1)    = (pi/2) c_{j-1} - 1/(2j-1)
    sum_i h_i c_i/(i+k)    = h_k/(k c_k)
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import mpmath
from gmpy2 import mpq

from .closedform import ClosedForm, Ln2, Pi
from .numerics import (
    PrecisionContext,
    Rational,
    Real,
    central_ratio,
    const_ln2,
    const_pi,
    const_zeta,
    harmonic,
    odd_harmonic,
    rational,
    to_mpf,
)
from .series.engine import evaluate_strict, tail_bracket
from .series.fixedpoint import head_sums, spare_bits
from .series.kernels import Kernel, SeriesFamily, Tag


class IdentityMismatch(AssertionError):
    """Two independent computations of an exact identity disagree."""


# ---------------------------------------------------------------------------
# exact values in span{1, pi, ln2}

@dataclass(frozen=True)
class BasisValue:
    rational: Rational = mpq(0)
    pi: Rational = mpq(0)
    ln2: Rational = mpq(0)

    def __post_init__(self):
        for name in ("rational", "pi", "ln2"):
            object.__setattr__(self, name, rational(getattr(self, name)))

    @classmethod
    def coerce(cls, x) -> "BasisValue":
        return x if isinstance(x, BasisValue) else cls(rational(x))

    def __add__(self, other):
        o = BasisValue.coerce(other)
        return BasisValue(self.rational + o.rational, self.pi + o.pi, self.ln2 + o.ln2)

    __radd__ = __add__

    def __neg__(self):
        return BasisValue(-self.rational, -self.pi, -self.ln2)

    def __sub__(self, other):
        return self + (-BasisValue.coerce(other))

    def __rsub__(self, other):
        return BasisValue.coerce(other) - self

    def __mul__(self, q):
        if isinstance(q, BasisValue):
            return NotImplemented
        q = rational(q)
        return BasisValue(self.rational * q, self.pi * q, self.ln2 * q)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.rational == 0 and self.pi == 0 and self.ln2 == 0

    def closed_form(self) -> ClosedForm:
        return (
            ClosedForm.constant(self.rational)
            + ClosedForm.symbol(Pi, coeff=self.pi)
            + ClosedForm.symbol(Ln2, coeff=self.ln2)
        )

    def evaluate(self, ctx: PrecisionContext) -> Real:
        with ctx.workdps():
            v = to_mpf(self.rational)
            if self.pi:
                v += to_mpf(self.pi) * const_pi(ctx).value
            if self.ln2:
                v += to_mpf(self.ln2) * const_ln2(ctx).value
            return Real(v, ctx)

    def __str__(self):
        return str(self.closed_form())


# ---------------------------------------------------------------------------
# lemma closed forms

def _check_index(k: int, lo: int = 1):
    if k < lo:
        raise ValueError(f"index must be >= {lo}, got {k}")


def lemma1_f(k: int) -> Rational:
    """sum_{i>=1} c_i/(i+k) = (1/k)/c_k - 1/k."""
    _check_index(k)
    return mpq(1, k) / central_ratio(k) - mpq(1, k)


def lemma2_f(k: int) -> BasisValue:
    """sum_{i>=1} c_i/(i+k)^2 in span{1, ln2}."""
    _check_index(k)
    inv_c = 1 / central_ratio(k)
    rat = (mpq(1, k * k) + 2 * odd_harmonic(k) / k - harmonic(k) / k) * inv_c - mpq(1, k * k)
    return BasisValue(rat, 0, -2 * inv_c / k)


def lemma3_g(j: int) -> BasisValue:
    """g(j) = sum_{i>=1} c_i/(2i+2j-1) = (pi/2) c_{j-1} - 1/(2j-1)."""
    _check_index(j)
    return BasisValue(-mpq(1, 2 * j - 1), central_ratio(j - 1) / 2, 0)


def lemma4_rhs(k: int) -> Rational:
    """sum_{i>=1} h_i c_i/(i+k) = (h_k/k)/c_k."""
    _check_index(k)
    return odd_harmonic(k) / k / central_ratio(k)


# kernels of the series the lemmas evaluate, used as numeric oracles

def lemma1_kernel(k: int) -> Kernel:
    return Kernel(central=1, linear=((1, k, -1),))


def lemma2_kernel(k: int) -> Kernel:
    return Kernel(central=1, linear=((1, k, -2),))


def lemma3_kernel(j: int) -> Kernel:
    return Kernel(central=1, linear=((2, 2 * j - 1, -1),))


def lemma4_kernel(k: int) -> Kernel:
    return Kernel(central=1, harmonics=(("h", 1),), linear=((1, k, -1),))


# ---------------------------------------------------------------------------
# first-order difference equations

@dataclass(frozen=True)
class RecurrenceProblem:
    """f(k) = coef(k) f(k-1) + inhom(k) for k > first_index, f(first_index) = init."""

    coef: Callable[[int], Rational]
    inhom: Callable[[int], object]
    init: BasisValue
    first_index: int = 1


def solve_first_order(p: RecurrenceProblem, K: int) -> list[BasisValue]:
    """[f(first_index), ..., f(K)] by exact forward substitution."""
    if K < p.first_index:
        raise ValueError("K must be >= first_index")
    f = BasisValue.coerce(p.init)
    out = [f]
    for k in range(p.first_index + 1, K + 1):
        a = rational(p.coef(k))
        if a == 0:
            raise ValueError(f"coefficient vanishes at k={k}")
        f = f * a + BasisValue.coerce(p.inhom(k))
        out.append(f)
    return out


def recurrence_residual(p: RecurrenceProblem, values: Sequence, k: int) -> BasisValue:
    """f(k) - coef(k) f(k-1) - inhom(k) for a candidate list starting at first_index."""
    i = k - p.first_index
    return (
        BasisValue.coerce(values[i])
        - BasisValue.coerce(values[i - 1]) * rational(p.coef(k))
        - BasisValue.coerce(p.inhom(k))
    )


def lemma1_problem() -> RecurrenceProblem:
    return RecurrenceProblem(
        coef=lambda k: mpq(2 * k - 2, 2 * k - 1),
        inhom=lambda k: mpq(1, k * (2 * k - 1)),
        init=BasisValue(1),
    )


def lemma3_problem() -> RecurrenceProblem:
    # g(j) - (2j-3)/(2j-2) g(j-1) = 1/((2j-2)(2j-1)), g(1) = pi/2 - 1
    return RecurrenceProblem(
        coef=lambda j: mpq(2 * j - 3, 2 * j - 2),
        inhom=lambda j: mpq(1, (2 * j - 2) * (2 * j - 1)),
        init=BasisValue(-1, mpq(1, 2), 0),
    )


def lemma4_problem() -> RecurrenceProblem:
    return RecurrenceProblem(
        coef=lambda k: mpq(2 * k - 2, 2 * k - 1),
        inhom=lambda k: 1 / (k * (2 * k - 1) * central_ratio(k)),
        init=BasisValue(2),
    )


# ---------------------------------------------------------------------------
# telescoping

def _seq(hseq) -> Callable[[int], Rational]:
    if callable(hseq):
        return lambda i: rational(hseq(i))
    return lambda i: rational(hseq[i - 1])


def _decays(d_half, d_full, ratio: float) -> bool:
    # increments ~ i^-p make the series converge iff p > 1/2 (c_i ~ i^-1/2)
    if d_full == 0:
        return True
    if d_half == 0:
        return False
    p = math.log(abs(float(d_half) / float(d_full))) / math.log(ratio)
    return p > 0.5


def telescope(hseq, K: int) -> tuple[Rational, bool]:
    """h(1) + sum_{i=1..K} (h(i+1) - h(i)) c_i exactly.

    ``hseq`` is a callable i -> h(i) or a sequence with hseq[0] = h(1).  The
    flag is False when the increments do not decay fast enough for the
    series to converge as K grows.
    """
    if K < 0:
        raise ValueError("K must be >= 0")
    h = _seq(hseq)
    prev = h(1)
    total = prev
    diffs = [mpq(0)]
    for i in range(1, K + 1):
        nxt = h(i + 1)
        diffs.append(nxt - prev)
        total += diffs[-1] * central_ratio(i)
        prev = nxt
    if K < 2:
        return total, True
    half = max(1, K // 2)
    return total, _decays(diffs[half], diffs[K], K / half)


def telescope_numeric(
    h1, increment: Callable[[int], Rational], K: int, ctx: PrecisionContext
) -> tuple[Real, bool]:
    """Fixed-point variant of ``telescope`` for large K.

    ``increment(i)`` is h(i+1) - h(i); the sum is carried in binary fixed
    point with enough spare bits to absorb K rounding errors.
    """
    bits = ctx.bits + spare_bits(K)
    one = 1 << bits
    c = one
    total = 0
    for i in range(1, K + 1):
        c = c * (2 * i - 1) // (2 * i)
        d = rational(increment(i))
        total += (c * int(d.numerator)) // int(d.denominator)
    with ctx.workdps():
        value = to_mpf(rational(h1)) + mpmath.ldexp(mpmath.mpf(total), -bits)
    half = max(1, K // 2)
    ok = _decays(rational(increment(half)), rational(increment(K)), K / half) if K >= 2 else True
    return Real(value, ctx), ok


# ---------------------------------------------------------------------------
# finite identities

def finite_binom_sum(k: int) -> Rational:
    """sum_{i=1..k} (1/(2i(2i+1)))/c_i, checked against 1 - 1/((2k+1) c_k)."""
    _check_index(k, 0)
    lhs = sum((mpq(1, 2 * i * (2 * i + 1)) / central_ratio(i) for i in range(1, k + 1)), mpq(0))
    rhs = 1 - 1 / ((2 * k + 1) * central_ratio(k))
    if lhs != rhs:
        raise IdentityMismatch(f"finite sum at k={k}: {lhs} != {rhs}")
    return lhs


def odd_partial_fraction(i: int, K: int) -> tuple[Rational, Rational]:
    """(sum_{k=1..K} 1/((2k-1)(2k+2i-1)), h_i/(2i)).

    The partial sum is computed directly and compared with its telescoped
    form (h_i - sum_{k=K+1..K+i} 1/(2k-1))/(2i), whose limit is h_i/(2i).
    """
    _check_index(i)
    _check_index(K, 0)
    num, den = 0, 1
    for k in range(1, K + 1):
        q = (2 * k - 1) * (2 * k + 2 * i - 1)
        num, den = num * q + den, den * q
        if k % 64 == 0:
            g = math.gcd(num, den)
            num, den = num // g, den // g
    partial = mpq(num, den)
    # 1/((2k-1)(2k+2i-1)) = (1/(2k-1) - 1/(2k+2i-1)) / (2i)
    head = sum((mpq(1, 2 * k - 1) for k in range(1, K + 1)), mpq(0))
    shifted = sum((mpq(1, 2 * k - 1) for k in range(i + 1, K + i + 1)), mpq(0))
    if partial != (head - shifted) / (2 * i):
        raise IdentityMismatch(f"partial fractions at i={i}, K={K}")
    return partial, odd_harmonic(i) / (2 * i)


def partial_fraction_check(i: int, k: int) -> bool:
    """Both decompositions of 1/(i (k+i)^2) and 1/(i^2 (k+i)^2), exactly."""
    _check_index(i)
    _check_index(k)
    a = mpq(1, i * (k + i) ** 2)
    b = mpq(1, k * k * i) - mpq(1, k * k * (k + i)) - mpq(1, k * (k + i) ** 2)
    c = mpq(1, i * i * (k + i) ** 2)
    d = (
        mpq(1, k * k * i * i)
        - mpq(2, k**3 * i)
        + mpq(2, k**3 * (k + i))
        + mpq(1, k * k * (k + i) ** 2)
    )
    return a == b and c == d


def antisymmetric_double_sum(K: int) -> Rational:
    """sum_{i,k<=K} c_i c_k [1/(i^2 (k+i)^2) - 1/(k^2 (k+i)^2)]; zero by index swap."""
    _check_index(K, 0)
    c = [central_ratio(n) for n in range(K + 1)]
    total = mpq(0)
    for i in range(1, K + 1):
        for k in range(1, K + 1):
            total += c[i] * c[k] * (mpq(1, i * i) - mpq(1, k * k)) / (k + i) ** 2
    return total


# ---------------------------------------------------------------------------
# convolution chains

class ConvolutionId(str, enum.Enum):
    EQ22_25 = "EQ22_25"
    EQ27_29 = "EQ27_29"
    EQ62_71 = "EQ62_71"
    EQ78_80 = "EQ78_80"
    EQ94_96 = "EQ94_96"

    @classmethod
    def parse(cls, text: str) -> "ConvolutionId":
        try:
            return cls(text.upper())
        except ValueError:
            raise ValueError(f"unknown convolution id {text!r}") from None


def _fam(tag: Tag, n: int | None = None) -> SeriesFamily:
    return SeriesFamily(tag, n)


def convolution_stages(cid, ctx: PrecisionContext) -> dict[str, Real]:
    """Every stage of the derivation chain, evaluated numerically.

    All stages of one chain are expressions for the same number; the
    residual is the largest deviation from the first stage.
    """
    cid = ConvolutionId.parse(cid) if isinstance(cid, str) else cid
    ev = lambda spec: evaluate_strict(spec, ctx)  # noqa: E731
    pi, ln2 = const_pi(ctx), const_ln2(ctx)
    z = lambda m: const_zeta(m, ctx)  # noqa: E731

    if cid is ConvolutionId.EQ22_25:
        s1, s2, s3 = ev(_fam(Tag.S, 1)), ev(_fam(Tag.S, 2)), ev(_fam(Tag.S, 3))
        lin_H, lin_h = ev(_fam(Tag.LIN_H, 2)), ev(_fam(Tag.LIN_h, 2))
        # D = sum_i (c_i/i) sum_k c_k/(k+i)^2, once by symmetry and Lemma 1,
        # once by inserting Lemma 2 term by term
        return {
            "symmetric": s1 * s2 / 2 - (z(3) - s3) / 2,
            "ln2_closed": ln2 * z(2) - 2 * ln2**3 - z(3) / 2 + s3 / 2,
            "lemma2": z(3) - 2 * ln2 * z(2) + 2 * lin_h - lin_H - s3,
            "lemma2_literature": z(3) - 2 * ln2 * z(2) + mpq(7, 2) * z(3) - 2 * z(3) - s3,
        }

    if cid is ConvolutionId.EQ27_29:
        s2, s3, s4 = ev(_fam(Tag.S, 2)), ev(_fam(Tag.S, 3)), ev(_fam(Tag.S, 4))
        zero = antisymmetric_double_sum(24)
        if zero != 0:
            raise IdentityMismatch(f"antisymmetric double sum is {zero}")
        return {
            "s4": s4,
            "from_s2_s3": z(4) - 2 * ln2 * s3 + s2 * s2 / 2,
            "closed_s2_s3": z(4)
            - 2 * ln2 * (2 * z(3) - 2 * ln2 * z(2) + mpq(4, 3) * ln2**3)
            + (z(2) - 2 * ln2**2) ** 2 / 2,
        }

    if cid is ConvolutionId.EQ62_71:
        # T = sum_k 1/(2k-1)^2 sum_i c_i/(2i+2k-1) = sum_k g(k)/(2k-1)^2
        weighted = ev(Kernel(central=1, linear=((1, 0, 1), (2, -1, -3))))
        odd_cubes = ev(Kernel(linear=((2, -1, -3),)))
        l2 = ev(_fam(Tag.L, 2))
        v2 = ev(_fam(Tag.V, 2))
        return {
            "lemma3": pi * weighted - odd_cubes,
            "via_l2": pi / 2 * l2 - mpq(7, 8) * z(3) + pi / 2,
            "closed": pi**2 / 4 * ln2 - mpq(7, 8) * z(3),
            "swapped": mpq(3, 4) * ln2 * z(2) - v2 / 4,
        }

    if cid is ConvolutionId.EQ78_80:
        lhs = ev(Kernel(central=1, harmonics=(("h", 1),), linear=((1, 0, -1), (2, -1, -2)), scale=mpq(1, 2)))
        a = ev(Kernel(linear=((1, 0, -2), (2, -1, -1))))
        b = ev(Kernel(central=1, linear=((1, 0, -1), (2, -1, -2))))
        c = ev(Kernel(linear=((1, 0, -2), (2, -1, -2))))
        q = ev(Kernel(central=1, linear=((2, -1, -2),)))
        v1, z1, z2 = ev(_fam(Tag.V, 1)), ev(_fam(Tag.Z, 1)), ev(_fam(Tag.Z, 2))
        # inner sum over i split by partial fractions in x = 2i-1; the first
        # piece is q ln2 with q = sum c_i/(2i-1)^2 = pi/2 - 1
        return {
            "lhs": lhs,
            "lemma3": q * ln2 - a / 4 + (pi * b - c) / 4,
            "lemma3_closed_q": (pi / 2 - 1) * ln2 - a / 4 + (pi * b - c) / 4,
            "closed": pi * ln2 - pi + mpq(3, 4) * z(2),
            "partial_fractions": v1 / 2 - z1 + z2,
        }

    if cid is ConvolutionId.EQ94_96:
        w1, v1 = ev(_fam(Tag.W, 1)), ev(_fam(Tag.V, 1))
        # the swapped double sum equals v1^2 - w1, hence w1 = v1^2 / 2
        swapped = v1 * v1 - w1
        return {
            "w1": w1,
            "swapped": swapped,
            "half_v1_squared": v1 * v1 / 2,
            "zeta2_squared": mpq(9, 8) * z(2) ** 2,
            "closed": mpq(45, 16) * z(4),
        }

    raise AssertionError(cid)


def verify_convolution(cid, ctx: PrecisionContext) -> Real:
    stages = list(convolution_stages(cid, ctx).values())
    first = stages[0]
    with ctx.workdps():
        return Real(max(abs((s - first).value) for s in stages[1:]), ctx)


# ---------------------------------------------------------------------------
# numeric oracles for the shifted series

def lemma2_oracle(k: int, ctx: PrecisionContext) -> Real:
    """|lemma2_f(k) - sum_i c_i/(i+k)^2| with the series summed by the engine."""
    series = evaluate_strict(lemma2_kernel(k), ctx)
    return abs(lemma2_f(k).evaluate(ctx) - series)


def lemma1_oracle(k: int, ctx: PrecisionContext) -> Real:
    series = evaluate_strict(lemma1_kernel(k), ctx)
    return abs(series - lemma1_f(k))


def lemma3_oracle(j: int, ctx: PrecisionContext) -> Real:
    series = evaluate_strict(lemma3_kernel(j), ctx)
    return abs(lemma3_g(j).evaluate(ctx) - series)


def lemma4_oracle(k: int, ctx: PrecisionContext) -> Real:
    series = evaluate_strict(lemma4_kernel(k), ctx)
    return abs(series - lemma4_rhs(k))


def lemma4_bracket(k: int, K: int, ctx: PrecisionContext) -> tuple[Real, Real, Real]:
    """(partial sum to K, lower, upper bound of the full series) for Lemma 4."""
    kern = lemma4_kernel(k)
    lo, hi = tail_bracket(kern, K, ctx)
    bits = ctx.bits + spare_bits(K)
    (head,) = head_sums(kern, [K], bits)
    with ctx.workdps():
        partial = Real(mpmath.ldexp(mpmath.mpf(head), -bits), ctx)
    return partial, partial + lo, partial + hi
