"""Large-k expansions of the series kernels.

A kernel f(k) is expanded as

    f(k) ~ k^-alpha * sum_{j <= M} sum_m a[j][m] k^-j (ln k)^m

which turns its tail into a finite combination of power-log tails.
Coefficients are mpf at the ambient precision.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from gmpy2 import mpq

from ..numerics import bernoulli, to_mpf
from .tails import power_log_integral, power_log_tail


@dataclass
class Expansion:
    alpha: Fraction
    coeffs: list  # coeffs[j][m]

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def one(cls, order: int) -> "Expansion":
        coeffs = [[mpmath.mpf(0)] for _ in range(order + 1)]
        coeffs[0][0] = mpmath.mpf(1)
        return cls(Fraction(0), coeffs)

    def __mul__(self, other: "Expansion") -> "Expansion":
        M = min(self.order, other.order)
        deg = (len(self.coeffs[0]) - 1) + (len(other.coeffs[0]) - 1)
        out = [[mpmath.mpf(0)] * (deg + 1) for _ in range(M + 1)]
        for j1, row1 in enumerate(self.coeffs[: M + 1]):
            for j2, row2 in enumerate(other.coeffs[: M + 1 - j1]):
                target = out[j1 + j2]
                for m1, a in enumerate(row1):
                    if not a:
                        continue
                    for m2, b in enumerate(row2):
                        if b:
                            target[m1 + m2] += a * b
        return Expansion(self.alpha + other.alpha, out)

    def scaled(self, factor) -> "Expansion":
        return Expansion(self.alpha, [[factor * a for a in row] for row in self.coeffs])

    def __call__(self, x) -> mpmath.mpf:
        """Evaluate the truncated expansion at a (large) point x."""
        x = mpmath.mpf(x)
        L = mpmath.log(x)
        total = mpmath.mpf(0)
        for j, row in enumerate(self.coeffs):
            total += x ** (-j) * mpmath.polyval(row[::-1], L)
        return x ** (-mpmath.mpf(self.alpha.numerator) / self.alpha.denominator) * total

    def _terms(self):
        a0 = mpmath.mpf(self.alpha.numerator) / self.alpha.denominator
        for j, row in enumerate(self.coeffs):
            for m, a in enumerate(row):
                if a:
                    yield a0 + j, m, a

    def tail(self, N: int, em_order: int) -> mpmath.mpf:
        """sum_{k >= N} of the expansion, term by term."""
        if self.alpha <= 1:
            raise ValueError(f"series diverges: decay exponent {self.alpha} <= 1")
        return mpmath.fsum(a * power_log_tail(s, m, N, em_order) for s, m, a in self._terms())

    def integral(self, N) -> mpmath.mpf:
        """Integral of the expansion over [N, inf)."""
        if self.alpha <= 1:
            raise ValueError(f"integral diverges: decay exponent {self.alpha} <= 1")
        return mpmath.fsum(a * power_log_integral(s, m, N) for s, m, a in self._terms())


def _series_exp(d: list) -> list:
    # exp of a power series with d[0] == 0:  n e_n = sum_k k d_k e_{n-k}
    e = [mpq(1)] + [mpq(0)] * (len(d) - 1)
    for n in range(1, len(d)):
        e[n] = sum(k * d[k] * e[n - k] for k in range(1, n + 1)) / n
    return e


@functools.lru_cache(maxsize=None)
def central_coefficients(order: int) -> tuple:
    """Rational e_j with C(2k,k)/4^k ~ (pi k)^-1/2 sum_j e_j k^-j.

    From the Stirling series for ln Gamma(k+1/2) - ln Gamma(k+1), whose 1/k^n
    coefficient is (-1)^(n+1) (B_{n+1}(1/2) - B_{n+1}(1)) / (n (n+1)) with
    B_j(1/2) = (2^(1-j) - 1) B_j.
    """
    d = [mpq(0)]
    for n in range(1, order + 1):
        j = n + 1
        bj = bernoulli(j)
        d.append((-1) ** (n + 1) * (mpq(2) ** (1 - j) - 2) * bj / (n * (n + 1)))
    return tuple(_series_exp(d))


def central_expansion(order: int) -> Expansion:
    inv_sqrt_pi = 1 / mpmath.sqrt(mpmath.pi)
    coeffs = [[inv_sqrt_pi * to_mpf(e)] for e in central_coefficients(order)]
    return Expansion(Fraction(1, 2), coeffs)


def _harmonic_like(order: int, const, log_coeff, inv_k, even_coeff) -> Expansion:
    # const + log_coeff ln k + inv_k / k + sum_j even_coeff(j) / k^(2j)
    coeffs = [[mpmath.mpf(0)] for _ in range(order + 1)]
    coeffs[0] = [const, mpmath.mpf(log_coeff)]
    if order >= 1:
        coeffs[1][0] = to_mpf(inv_k)
    for j in range(1, order // 2 + 1):
        coeffs[2 * j][0] = to_mpf(even_coeff(j))
    return Expansion(Fraction(0), coeffs)


def harmonic_expansion(order: int) -> Expansion:
    """H_k ~ ln k + gamma + 1/(2k) - sum_j B_2j / (2j k^2j)."""
    return _harmonic_like(
        order, +mpmath.euler, 1, mpq(1, 2), lambda j: -bernoulli(2 * j) / (2 * j)
    )


def odd_harmonic_expansion(order: int) -> Expansion:
    """h_k = H_2k - H_k/2 ~ (ln k)/2 + ln 2 + gamma/2 + sum_j B_2j (1/2 - 4^-j) / (2j k^2j)."""
    return _harmonic_like(
        order,
        mpmath.ln2 + mpmath.euler / 2,
        mpmath.mpf(1) / 2,
        mpq(0),
        lambda j: bernoulli(2 * j) * (mpq(1, 2) - mpq(1, 4**j)) / (2 * j),
    )


def double_harmonic_expansion(order: int) -> Expansion:
    """H_2k ~ ln k + ln 2 + gamma + 1/(4k) - sum_j B_2j / (2j 4^j k^2j)."""
    return _harmonic_like(
        order,
        mpmath.ln2 + mpmath.euler,
        1,
        mpq(1, 4),
        lambda j: -bernoulli(2 * j) / (2 * j * 4**j),
    )


def linear_expansion(a: int, b: int, e: int, order: int) -> Expansion:
    """(a k + b)^e = a^e k^e (1 + (b/a)/k)^e, expanded binomially."""
    if a <= 0:
        raise ValueError("leading coefficient must be positive")
    r = mpq(b, a)
    coeffs = []
    binom = mpq(1)
    for j in range(order + 1):
        coeffs.append([to_mpf(binom * r**j)])
        binom = binom * (e - j) / (j + 1)
    lead = to_mpf(mpq(a) ** e)
    return Expansion(Fraction(-e), [[lead * c[0]] for c in coeffs])
