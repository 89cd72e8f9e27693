"""Tails of sum k^-s (ln k)^m, the building block every series tail reduces to.

All functions work at the ambient mpmath precision.
"""

from __future__ import annotations

import functools

import mpmath

from ..numerics import PrecisionContext, bernoulli, to_mpf


@functools.lru_cache(maxsize=64)
def _em_weights(order: int, prec: int) -> tuple:
    # B_{2j} / (2j)! for j = 1..order
    with mpmath.workprec(prec):
        return tuple(to_mpf(bernoulli(2 * j)) / mpmath.factorial(2 * j) for j in range(1, order + 1))


def power_log_integral(s, m: int, N) -> mpmath.mpf:
    """Integral of x^-s (ln x)^m over [N, inf), s > 1."""
    s = mpmath.mpf(s)
    N = mpmath.mpf(N)
    if s <= 1:
        raise ValueError("integral diverges for s <= 1")
    L = mpmath.log(N)
    d = s - 1
    # sum_i m!/(m-i)! L^(m-i) / d^(i+1)
    total = mpmath.mpf(0)
    fall = mpmath.mpf(1)
    for i in range(m + 1):
        total += fall * L ** (m - i) / d ** (i + 1)
        fall *= m - i
    return N ** (-d) * total


def power_log_tail(s, m: int, N: int, order: int = 12) -> mpmath.mpf:
    """sum_{k >= N} k^-s (ln k)^m by Euler-Maclaurin with ``order`` Bernoulli terms.

    The remainder is of size (2 pi N)^(-2 order) relative to N^(1-s), so N in
    the thousands needs only a handful of terms.
    """
    s = mpmath.mpf(s)
    if N < 1:
        raise ValueError("N must be >= 1")
    x = mpmath.mpf(N)
    L = mpmath.log(x)
    weights = _em_weights(order, mpmath.mp.prec)

    def at(coeffs, r):
        # x^-(s+r) * sum_i coeffs[i] L^i
        return x ** (-(s + r)) * mpmath.polyval(coeffs[::-1], L)

    b = [mpmath.mpf(0)] * m + [mpmath.mpf(1)]
    total = power_log_integral(s, m, N) + at(b, 0) / 2
    for r in range(2 * order):
        # d/dx [x^-t L^i] = x^-(t+1) (-t L^i + i L^(i-1)),  t = s + r
        t = s + r
        b = [-t * b[i] + (i + 1) * b[i + 1] if i + 1 < len(b) else -t * b[i] for i in range(len(b))]
        if r % 2 == 0:  # b now holds the (r+1)-th derivative, r+1 odd
            total -= weights[r // 2] * at(b, r + 1)
    return total


def zeta_direct(m: int, ctx: PrecisionContext, N: int = 64) -> mpmath.mpf:
    """zeta(m) as a direct sum to N-1 plus an Euler-Maclaurin tail."""
    with ctx.workdps():
        head = mpmath.fsum(mpmath.mpf(k) ** (-m) for k in range(1, N))
        order = max(4, ctx.working // 4)
        return head + power_log_tail(m, 0, N, order)
