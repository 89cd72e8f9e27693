"""Relations among the nonlinear Euler sums.

Every sum is evaluated independently by the series engine, so a relation
residual measures the relation itself, not a chain of imported values.
"""

from __future__ import annotations

import enum

from gmpy2 import mpq

from .catalog import catalog_get
from .closedform import cf_evaluate
from .numerics import PrecisionContext, Rational, Real, harmonic, odd_harmonic
from .series.engine import evaluate_strict
from .series.kernels import SeriesFamily, Tag, lcm_upto


class RelationId(str, enum.Enum):
    SPLIT_EQ104 = "SPLIT_EQ104"
    ASSEMBLE_EQ105 = "ASSEMBLE_EQ105"
    MIX_FROM_EQ101 = "MIX_FROM_EQ101"
    W_IDENTITY_EQ95 = "W_IDENTITY_EQ95"

    @classmethod
    def parse(cls, text: str) -> "RelationId":
        try:
            return cls(text.upper())
        except ValueError:
            raise ValueError(f"unknown relation {text!r}") from None


def _ev(tag: Tag, ctx: PrecisionContext, n: int | None = None) -> Real:
    return evaluate_strict(SeriesFamily(tag, n), ctx)


def relation_sides(rid, ctx: PrecisionContext) -> list[tuple[str, Real, Real]]:
    """(label, lhs, rhs) pairs making up the relation."""
    rid = RelationId.parse(rid) if isinstance(rid, str) else rid
    if rid is RelationId.SPLIT_EQ104:
        # sum_{k} H_k^2/k^3 - sum_k (-1)^(k-1) H_k^2/k^3 keeps twice the even terms
        hh, alt, sq = _ev(Tag.HH_K3, ctx), _ev(Tag.ALT_H2_K3, ctx), _ev(Tag.H2K_SQ, ctx)
        return [("split", hh - alt, sq / 4)]
    if rid is RelationId.ASSEMBLE_EQ105:
        # H_2k = h_k + H_k/2 squared, with the split above
        hh, alt, mix = _ev(Tag.HH_K3, ctx), _ev(Tag.ALT_H2_K3, ctx), _ev(Tag.MIX_Hh_K3, ctx)
        hsq = _ev(Tag.HSQ_K3, ctx)
        rhs = hh * mpq(15, 4) - alt * 4 - mix
        closed = cf_evaluate(catalog_get(Tag.HSQ_K3).closed_form, ctx)
        return [("assemble", hsq, rhs), ("catalog", closed, rhs)]
    if rid is RelationId.MIX_FROM_EQ101:
        # sum H_k H_2k/(2k)^3 = (1/8) (sum H_k h_k/k^3 + (1/2) sum H_k^2/k^3)
        weighted, hh, mix = _ev(Tag.H2K_WEIGHTED, ctx), _ev(Tag.HH_K3, ctx), _ev(Tag.MIX_Hh_K3, ctx)
        return [("even_odd", mix, weighted * 8 - hh / 2)]
    if rid is RelationId.W_IDENTITY_EQ95:
        # the swapped double sum gives w(1) = v(1)^2 - w(1)
        w1, v1 = _ev(Tag.W, ctx, 1), _ev(Tag.V, ctx, 1)
        closed = cf_evaluate(catalog_get(Tag.W, 1).closed_form, ctx)
        return [("square", w1, v1 * v1 / 2), ("catalog", closed, v1 * v1 / 2)]
    raise AssertionError(rid)


def relation_residual(rid, ctx: PrecisionContext | None = None) -> Real:
    ctx = ctx or PrecisionContext()
    sides = relation_sides(rid, ctx)
    with ctx.workdps():
        return Real(max(abs(lhs.value - rhs.value) for _, lhs, rhs in sides), ctx)


def w_closed_form_check(n: int, ctx: PrecisionContext | None = None) -> Real:
    """|sum h_k^2/k^(2n) - catalog closed form| for n = 1, 2, 3."""
    if n not in (1, 2, 3):
        raise ValueError("n must be 1, 2 or 3")
    ctx = ctx or PrecisionContext()
    numeric = _ev(Tag.W, ctx, n)
    return abs(numeric - cf_evaluate(catalog_get(Tag.W, n).closed_form, ctx))


def even_odd_partition(K: int) -> tuple[Rational, Rational]:
    """Both sides of the split at truncation 2K, exactly.

    sum_{k<=2K} H_k^2/k^3 - sum_{k<=2K} (-1)^(k-1) H_k^2/k^3  and  1/4 sum_{k<=K} H_2k^2/k^3.
    """
    if K < 0:
        raise ValueError("K must be >= 0")
    hh = SeriesFamily(Tag.HH_K3).kernel.partial_sum(2 * K)
    alt = SeriesFamily(Tag.ALT_H2_K3).kernel.partial_sum(2 * K)
    sq = SeriesFamily(Tag.H2K_SQ).kernel.partial_sum(K)
    return hh - alt, sq / 4


def double_harmonic_square(k: int) -> bool:
    """H_2k^2 == h_k^2 + h_k H_k + H_k^2/4, exactly."""
    H2, h, H = harmonic(2 * k), odd_harmonic(k), harmonic(k)
    return H2 * H2 == h * h + h * H + H * H / 4


def double_harmonic_square_upto(K: int) -> int:
    """Check the square identity for every k <= K; returns the first failing k or 0.

    All three harmonic numbers are carried as integer numerators over
    D = lcm(1..2K), where the identity reads 4 x2^2 = 4 xh^2 + 4 xh xH + xH^2.
    """
    D = lcm_upto(2 * K)
    xH = xh = x2 = 0
    for k in range(1, K + 1):
        xH += D // k
        xh += D // (2 * k - 1)
        x2 += D // (2 * k - 1) + D // (2 * k)
        if 4 * x2 * x2 != 4 * xh * xh + 4 * xh * xH + xH * xH:
            return k
    return 0
