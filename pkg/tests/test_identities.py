from __future__ import annotations

from fractions import Fraction

import mpmath
import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from binomsums.identities import (
    BasisValue,
    ConvolutionId,
    IdentityMismatch,
    RecurrenceProblem,
    antisymmetric_double_sum,
    convolution_stages,
    finite_binom_sum,
    lemma1_f,
    lemma1_oracle,
    lemma1_problem,
    lemma2_f,
    lemma2_oracle,
    lemma3_g,
    lemma3_oracle,
    lemma3_problem,
    lemma4_bracket,
    lemma4_oracle,
    lemma4_problem,
    lemma4_rhs,
    odd_partial_fraction,
    partial_fraction_check,
    recurrence_residual,
    solve_first_order,
    telescope,
    telescope_numeric,
    verify_convolution,
)
from binomsums.numerics import central_ratio, const_pi, odd_harmonic, to_mpf
from binomsums.series import SeriesFamily, Tag, tail_bracket

EPS20 = mpmath.mpf(10) ** -20


def test_basis_value_arithmetic():
    a = BasisValue(1, mpq(1, 2), 0)
    b = BasisValue(mpq(1, 3), 0, 2)
    assert a + b == BasisValue(mpq(4, 3), mpq(1, 2), 2)
    assert (a - a).is_zero()
    assert a * 2 == BasisValue(2, 1, 0)
    assert 1 - a == BasisValue(0, mpq(-1, 2), 0)
    assert str(BasisValue(-1, mpq(1, 2))) == "-1 + 1/2*pi"


@pytest.mark.parametrize("k,expected", [(1, Fraction(1)), (2, Fraction(5, 6)), (3, Fraction(11, 15))])
def test_lemma1_values(k, expected):
    assert lemma1_f(k) == expected


def test_lemma2_values():
    assert lemma2_f(1) == BasisValue(3, 0, -4)
    assert lemma2_f(2) == BasisValue(mpq(71, 36), 0, mpq(-8, 3))


def test_lemma3_values():
    assert lemma3_g(1) == BasisValue(-1, mpq(1, 2), 0)
    assert lemma3_g(2) == BasisValue(mpq(-1, 3), mpq(1, 4), 0)
    assert lemma3_g(3) == BasisValue(mpq(-1, 5), mpq(3, 16), 0)


def test_lemma4_values():
    assert lemma4_rhs(1) == 2
    assert lemma4_rhs(2) == Fraction(16, 9)
    assert lemma4_rhs(3) == Fraction(368, 225)


def test_index_guards():
    for fn in (lemma1_f, lemma2_f, lemma3_g, lemma4_rhs):
        with pytest.raises(ValueError):
            fn(0)


@pytest.mark.property
@pytest.mark.parametrize(
    "problem,closed",
    [(lemma1_problem, lemma1_f), (lemma3_problem, lemma3_g), (lemma4_problem, lemma4_rhs)],
    ids=["lemma1", "lemma3", "lemma4"],
)
def test_recurrence_reproduces_closed_form(problem, closed):
    p = problem()
    solved = solve_first_order(p, 2000)
    for k in range(1, 2001):
        diff = solved[k - 1] - closed(k)
        assert diff.rational == 0 and diff.pi == 0 and diff.ln2 == 0
    # the closed forms also satisfy the recurrence directly
    values = [closed(k) for k in range(1, 2001)]
    for k in range(2, 2001):
        assert recurrence_residual(p, values, k).is_zero()


def test_trivial_recurrence():
    p = RecurrenceProblem(coef=lambda k: 1, inhom=lambda k: 0, init=BasisValue(7))
    assert all(v == BasisValue(7) for v in solve_first_order(p, 50))
    with pytest.raises(ValueError):
        solve_first_order(RecurrenceProblem(lambda k: 0, lambda k: 1, BasisValue(1)), 3)


@pytest.mark.parametrize("k", [1, 2, 5, 11, 20])
def test_lemma2_oracle(k, ctx30):
    assert lemma2_oracle(k, ctx30).value < EPS20


@pytest.mark.parametrize("k", [1, 4, 20])
def test_lemma1_and_lemma3_oracles(k, ctx30):
    assert lemma1_oracle(k, ctx30).value < EPS20
    assert lemma3_oracle(k, ctx30).value < EPS20


@pytest.mark.parametrize("k", [1, 3, 20])
def test_lemma4_oracle_and_bracket(k, ctx30):
    assert lemma4_oracle(k, ctx30).value < EPS20
    partial, lo, hi = lemma4_bracket(k, 2000, ctx30)
    assert partial < lemma4_rhs(k)
    assert lo <= lemma4_rhs(k) <= hi


def test_lemma4_truncation_approaches_from_below(ctx30):
    target = lemma4_rhs(3)
    p1, _, _ = lemma4_bracket(3, 10_000, ctx30)
    p2, lo, hi = lemma4_bracket(3, 100_000, ctx30)
    assert p1 < p2 < target
    assert lo <= target <= hi
    assert (hi - lo).value < mpmath.mpf(10) ** -6


def test_telescope_constant_sequence():
    for K in (0, 1, 10, 100):
        value, ok = telescope(lambda i: 1, K)
        assert value == 1 and ok


def test_telescope_divergence_flag():
    _, ok = telescope(lambda i: i, 200)
    assert not ok


def test_telescope_sequence_input():
    seq = [odd_harmonic(i) for i in range(1, 40)]
    assert telescope(seq, 30) == telescope(odd_harmonic, 30)


def test_telescope_odd_harmonic_to_half_pi(ctx30):
    value, ok = telescope(odd_harmonic, 300)
    assert ok
    assert to_mpf(value) < mpmath.pi / 2
    # h(i+1) - h(i) = 1/(2i+1): the sum is 1 + sum c_i/(2i+1), whose tail is the L(1) tail
    K = 10**6
    num, ok = telescope_numeric(1, lambda i: mpq(1, 2 * i + 1), K, ctx30)
    assert ok
    lo, hi = tail_bracket(SeriesFamily(Tag.L, 1), K, ctx30)
    missing = const_pi(ctx30) / 2 - num
    assert lo <= missing <= hi


def test_telescope_numeric_matches_exact(ctx30):
    exact, _ = telescope(odd_harmonic, 500)
    num, _ = telescope_numeric(1, lambda i: mpq(1, 2 * i + 1), 500, ctx30)
    assert abs(num - exact).value < mpmath.mpf(10) ** -30


@pytest.mark.parametrize("k,expected", [(0, Fraction(0)), (1, Fraction(1, 3)), (2, Fraction(7, 15))])
def test_finite_binom_sum_values(k, expected):
    assert finite_binom_sum(k) == expected


@pytest.mark.property
def test_finite_binom_sum_streaming():
    total = Fraction(0)
    for k in range(1, 401):
        c = Fraction(int(central_ratio(k).numerator), int(central_ratio(k).denominator))
        total += Fraction(1, 2 * k * (2 * k + 1)) / c
        assert total == 1 - 1 / ((2 * k + 1) * c)
    assert finite_binom_sum(400) == total


def test_odd_partial_fraction_values():
    assert odd_partial_fraction(1, 5)[1] == Fraction(1, 2)
    assert odd_partial_fraction(2, 5)[1] == Fraction(1, 3)
    partial, limit = odd_partial_fraction(3, 10_000)
    assert limit == Fraction(23, 90)
    assert 0 < limit - partial < Fraction(1, 10_000)


@pytest.mark.parametrize("i,k", [(1, 1), (7, 3)])
def test_partial_fraction_check_values(i, k):
    assert partial_fraction_check(i, k)


@pytest.mark.property
@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10**6), st.integers(1, 10**6))
def test_partial_fraction_randomized(i, k):
    assert partial_fraction_check(i, k)


@pytest.mark.property
@pytest.mark.parametrize("K", [0, 1, 2, 5, 13, 30])
def test_antisymmetric_double_sum_zero(K):
    assert antisymmetric_double_sum(K) == 0


@pytest.mark.parametrize("cid", list(ConvolutionId))
def test_convolution_chains(cid, ctx30):
    assert verify_convolution(cid, ctx30).value < EPS20


def test_w_chain_stage_values(ctx30):
    stages = convolution_stages("EQ94_96", ctx30)
    assert stages["closed"].decimal(6) == "3.04403"
    assert abs(stages["w1"] - stages["half_v1_squared"]).value < EPS20


def test_convolution_parse():
    assert ConvolutionId.parse("eq22_25") is ConvolutionId.EQ22_25
    with pytest.raises(ValueError):
        ConvolutionId.parse("EQ1_2")


def test_identity_mismatch_is_assertion():
    assert issubclass(IdentityMismatch, AssertionError)
