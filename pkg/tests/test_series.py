from __future__ import annotations

from fractions import Fraction

import mpmath
import pytest

from binomsums.catalog import catalog_all, catalog_get
from binomsums.closedform import cf_evaluate
from binomsums.numerics import PrecisionContext, central_ratio, harmonic, odd_harmonic, to_mpf
from binomsums.series import (
    EvalOptions,
    NonConvergenceError,
    SeriesFamily,
    Tag,
    evaluate,
    evaluate_strict,
    partial_sum,
    tail_bracket,
    term,
)


def frac(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def fam(text):
    return SeriesFamily.parse(text)


def test_family_validation():
    with pytest.raises(ValueError):
        SeriesFamily(Tag.S, 0)
    with pytest.raises(ValueError):
        SeriesFamily(Tag.LIN_h, 1)
    with pytest.raises(ValueError):
        SeriesFamily(Tag.HSQ_K3, 2)
    with pytest.raises(ValueError):
        SeriesFamily.parse("nope")
    assert fam("s4") == SeriesFamily(Tag.S, 4)
    assert fam("S:4") == SeriesFamily(Tag.S, 4)
    assert str(fam("LIN_h:3")) == "LIN_h:3"
    assert str(fam("lin_H:3")) == "LIN_H:3"


def test_options_validation():
    with pytest.raises(ValueError):
        EvalOptions(cutoff=99)
    with pytest.raises(ValueError):
        EvalOptions(em_order=1)


def test_term_values():
    assert term(fam("S:1"), 2) == Fraction(3, 16)
    assert term(fam("L:1"), 1) == Fraction(1, 6)
    assert term(fam("V:2"), 2) == Fraction(1, 8)


def test_partial_sum_values():
    assert partial_sum(fam("S:1"), 2) == Fraction(11, 16)
    # h_k^2/k^(2n): n = 1 gives 1 + (16/9)/4, n = 2 gives 1 + (16/9)/16
    assert partial_sum(fam("W:1"), 2) == Fraction(13, 9)
    assert partial_sum(fam("W:2"), 2) == Fraction(10, 9)
    for e in catalog_all():
        assert partial_sum(e.family, 0) == 0


# direct Fraction definitions of every family, independent of the kernel tables
DIRECT = {
    "S:3": lambda k: central_ratio(k) / k**3,
    "L:2": lambda k: central_ratio(k) / (2 * k + 1) ** 2,
    "V:2": lambda k: odd_harmonic(k) * central_ratio(k) / k**2,
    "Z:2": lambda k: odd_harmonic(k) * central_ratio(k) / (2 * k - 1) ** 2,
    "W:2": lambda k: odd_harmonic(k) ** 2 / k**4,
    "LIN_H:2": lambda k: harmonic(k) / k**2,
    "LIN_h:3": lambda k: odd_harmonic(k) / k**3,
    "HSQ_K3": lambda k: odd_harmonic(k) ** 2 / k**3,
    "H2K_WEIGHTED": lambda k: harmonic(k) * harmonic(2 * k) / (2 * k) ** 3,
    "MIX_Hh_K3": lambda k: harmonic(k) * odd_harmonic(k) / k**3,
    "ALT_H2_K3": lambda k: (-1) ** (k - 1) * harmonic(k) ** 2 / k**3,
    "H2K_SQ": lambda k: harmonic(2 * k) ** 2 / k**3,
    "HH_K3": lambda k: harmonic(k) ** 2 / k**3,
}


@pytest.mark.parametrize("name", sorted(DIRECT))
def test_exact_partial_sums_match_definition(name):
    f = DIRECT[name]
    spec = fam(name)
    for K in (1, 7, 60):
        expected = sum((frac(f(k)) for k in range(1, K + 1)), Fraction(0))
        assert frac(partial_sum(spec, K)) == expected


@pytest.mark.parametrize(
    "name,closed",
    [
        ("S:1", lambda: 2 * mpmath.log(2)),
        ("L:1", lambda: mpmath.pi / 2 - 1),
        ("V:1", lambda: mpmath.mpf(3) / 2 * mpmath.zeta(2)),
        ("Z:2", lambda: mpmath.pi * mpmath.log(2) - mpmath.pi / 2),
        ("Z:1", lambda: mpmath.pi / 2),
    ],
)
def test_evaluate_classical(name, closed, ctx30):
    res = evaluate(fam(name), ctx30)
    assert res.converged
    assert res.self_error.value <= ctx30.default_tol()
    with ctx30.workdps():
        assert abs(res.value.value - closed()) < mpmath.mpf(10) ** -25


def test_alternating_family(ctx30):
    spec = fam("ALT_H2_K3")
    res = evaluate(spec, ctx30)
    assert res.converged
    closed = cf_evaluate(catalog_get(spec).closed_form, ctx30)
    assert abs(res.value - closed).value < mpmath.mpf(10) ** -25
    # consecutive partial sums bracket the limit
    with ctx30.workdps():
        for K in (50, 51, 200, 201):
            a, b = to_mpf(partial_sum(spec, K)), to_mpf(partial_sum(spec, K + 1))
            assert min(a, b) <= res.value.value <= max(a, b)


def test_alternating_agrees_with_even_odd_split(ctx30):
    # sum (-1)^(k-1) H_k^2/k^3 = sum H_k^2/k^3 - (1/4) sum H_2k^2/k^3
    alt = evaluate_strict(fam("ALT_H2_K3"), ctx30)
    split = evaluate_strict(fam("HH_K3"), ctx30) - evaluate_strict(fam("H2K_SQ"), ctx30) / 4
    assert abs(alt - split).value < mpmath.mpf(10) ** -15


@pytest.mark.parametrize("name,width", [("S:2", mpmath.mpf("1e-5")), ("S:1", mpmath.mpf("0.1"))])
def test_tail_bracket_at_10k(name, width, ctx30):
    spec = fam(name)
    lo, hi = tail_bracket(spec, 10_000, ctx30)
    assert (hi - lo).value < width
    v = evaluate(spec, ctx30).value
    with ctx30.workdps():
        rest = v.value - to_mpf(partial_sum(spec, 10_000))
        assert lo.value <= rest <= hi.value


def test_tail_bracket_from_zero(ctx30):
    spec = fam("V:3")
    lo, hi = tail_bracket(spec, 0, ctx30)
    v = evaluate(spec, ctx30).value
    assert lo <= v <= hi


def test_tail_bracket_rejects_alternating(ctx30):
    with pytest.raises(ValueError):
        tail_bracket(fam("ALT_H2_K3"), 10, ctx30)


@pytest.mark.property
@pytest.mark.parametrize("name", ["S:2", "L:3", "V:1", "Z:4", "W:2", "LIN_h:2", "MIX_Hh_K3", "H2K_WEIGHTED"])
def test_oracle_consistency_bracket(name, ctx30):
    spec = fam(name)
    K = 2000
    lo, hi = tail_bracket(spec, K, ctx30)
    v = evaluate(spec, ctx30).value
    with ctx30.workdps():
        rest = v.value - to_mpf(partial_sum(spec, K))
        assert lo.value <= rest <= hi.value


@pytest.mark.property
@pytest.mark.parametrize("name", ["S:3", "L:2", "W:1", "LIN_H:2", "HSQ_K3", "ALT_H2_K3"])
def test_precision_monotonicity(name):
    a = evaluate_strict(fam(name), PrecisionContext(20))
    b = evaluate_strict(fam(name), PrecisionContext(40))
    assert a.agrees_with(b, 18)


@pytest.mark.property
def test_kernel_positivity():
    for e in catalog_all():
        if e.family.kernel.alternating:
            continue
        k = e.family.kernel
        assert all(k.term(i) > 0 for i in range(1, 2001))


@pytest.mark.property
@pytest.mark.parametrize("name", ["S:5", "V:2", "Z:3"])
def test_self_certification(name, ctx30):
    spec = fam(name)
    a = evaluate(spec, ctx30)
    b = evaluate(spec, ctx30, EvalOptions(cutoff=20_000))
    assert a.converged
    assert abs(a.value - b.value).value < ctx30.default_tol()


def test_nonconvergence_is_reported_not_raised():
    ctx = PrecisionContext(60)
    opts = EvalOptions(cutoff=100, em_order=2)
    res = evaluate(fam("S:1"), ctx, opts)
    assert not res.converged
    assert res.reason
    assert res.self_error.value > opts.tolerance(ctx)
    with pytest.raises(NonConvergenceError):
        evaluate_strict(fam("S:1"), ctx, opts)
