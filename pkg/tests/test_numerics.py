from __future__ import annotations

from fractions import Fraction
from math import comb

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from binomsums.numerics import (
    PrecisionContext,
    Real,
    central_ratio,
    const_li_half,
    const_ln2,
    const_pi,
    const_zeta,
    constant_crosschecks,
    harmonic,
    odd_harmonic,
    sequence_table,
    to_mpf,
)
from binomsums.series.tails import power_log_tail, zeta_direct


def test_context_validation():
    with pytest.raises(ValueError):
        PrecisionContext(9)
    with pytest.raises(ValueError):
        PrecisionContext(20, guard=4)
    ctx = PrecisionContext(30)
    assert ctx.working == 40
    assert ctx.default_tol() == mpmath.mpf(10) ** -25


@pytest.mark.parametrize("k,expected", [(0, Fraction(1)), (1, Fraction(1, 2)), (2, Fraction(3, 8))])
def test_central_ratio_values(k, expected):
    assert central_ratio(k) == expected


@pytest.mark.parametrize("k,expected", [(0, Fraction(0)), (3, Fraction(11, 6)), (6, Fraction(49, 20))])
def test_harmonic_values(k, expected):
    assert harmonic(k) == expected


def test_odd_harmonic_values():
    assert odd_harmonic(1) == 1
    assert odd_harmonic(2) == Fraction(4, 3)
    assert odd_harmonic(3) == Fraction(23, 15)
    assert odd_harmonic(3) == harmonic(6) - harmonic(3) / 2


def test_rationals_reduced():
    q = harmonic(50)
    assert Fraction(int(q.numerator), int(q.denominator)) == Fraction(sum(Fraction(1, i) for i in range(1, 51)))
    assert q.denominator > 0


@pytest.mark.property
def test_sequence_recurrences_to_10k():
    K = 10_000
    t = sequence_table(K)
    assert t.c[0] == 1 and t.H[0] == 0 and t.h[0] == 0
    for k in range(1, K + 1):
        assert t.c[k] == t.c[k - 1] * (2 * k - 1) / (2 * k)
        assert t.H[k] == t.H[k - 1] + Fraction(1, k)
        assert t.h[k] == t.h[k - 1] + Fraction(1, 2 * k - 1)
        assert t.h[k] == t.H[2 * k] - t.H[k] / 2


@pytest.mark.property
@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=20_000))
def test_central_ratio_matches_binomial(k):
    assert central_ratio(k) == Fraction(comb(2 * k, k), 4**k)


@pytest.mark.property
@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=20_000))
def test_odd_harmonic_identity(k):
    assert odd_harmonic(k) == harmonic(2 * k) - harmonic(k) / 2


def test_central_ratio_sqrt_growth():
    c = sequence_table(10_000).c
    with mpmath.workdps(20):
        prev = mpmath.mpf(0)
        for k in range(1, 10_001):
            v = to_mpf(c[k]) * mpmath.sqrt(k)
            assert prev < v < mpmath.mpf("0.5642")
            prev = v


def test_constants_known_digits():
    ctx = PrecisionContext(15)
    assert const_pi(ctx).decimal(15) == "3.14159265358979"
    assert const_ln2(ctx).decimal(15) == "0.693147180559945"


def test_zeta_even_classical(ctx40):
    with ctx40.workdps():
        pi = const_pi(ctx40).value
        assert abs(const_zeta(2, ctx40).value - pi**2 / 6) < mpmath.mpf(10) ** -40
        assert abs(const_zeta(4, ctx40).value - pi**4 / 90) < mpmath.mpf(10) ** -40


def test_zeta3_vs_direct_sum(ctx30):
    with ctx30.workdps():
        assert abs(const_zeta(3, ctx30).value - zeta_direct(3, ctx30)) < mpmath.mpf(10) ** -30


def test_li_half(ctx30):
    with ctx30.workdps():
        pi, ln2 = const_pi(ctx30).value, const_ln2(ctx30).value
        eps = mpmath.mpf(10) ** -30
        assert abs(const_li_half(1, ctx30).value - ln2) < eps
        assert abs(const_li_half(2, ctx30).value - (pi**2 / 12 - ln2**2 / 2)) < eps
        for m in (3, 4, 5):
            assert abs(const_li_half(m, ctx30).value - mpmath.polylog(m, mpmath.mpf(1) / 2)) < eps


def test_constant_crosschecks(ctx40):
    checks = constant_crosschecks(ctx40)
    assert max(checks.values()) < mpmath.mpf(10) ** -40


@pytest.mark.property
@pytest.mark.parametrize(
    "fn",
    [const_pi, const_ln2, lambda c: const_zeta(3, c), lambda c: const_zeta(5, c), lambda c: const_li_half(4, c)],
)
@pytest.mark.parametrize("d", [15, 25, 40])
def test_precision_doubling_constants(fn, d):
    a = fn(PrecisionContext(d))
    b = fn(PrecisionContext(2 * d))
    assert a.agrees_with(b, d)


def test_real_mixed_context_takes_coarser():
    a = const_pi(PrecisionContext(20))
    b = const_pi(PrecisionContext(50))
    c = a + b
    assert c.ctx.digits == 20
    assert isinstance(-a, Real) and (-a).ctx == a.ctx


def test_real_negation_keeps_precision():
    ctx = PrecisionContext(50)
    x = const_pi(ctx)
    with ctx.workdps():
        assert (-x).value == -x.value
        assert abs(-x).value == x.value


@pytest.mark.parametrize("s,m,N", [(2, 0, 100), (3, 1, 1000), (2.5, 2, 500), (4, 3, 2000)])
def test_power_log_tail_vs_hurwitz(s, m, N):
    with mpmath.workdps(40):
        ours = power_log_tail(s, m, N)
        # d^m/ds^m zeta(s, N) = (-1)^m sum_{k>=N} (ln k)^m k^-s
        ref = (-1) ** m * mpmath.zeta(s, N, m)
        assert abs(ours - ref) <= abs(ref) * mpmath.mpf(10) ** -35
