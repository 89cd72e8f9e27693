"""Series families and their summand kernels.

Every family is a product kernel

    sign_k * scale * c_k^p * H_k^a * h_k^b * H_2k^d * prod (u k + v)^e

which is all the machinery below needs to know about it: the exact k-th term,
exact partial sums, a fixed-point head sum and the large-k expansion.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
from gmpy2 import mpq, mpz

from ..numerics import Rational, central_ratio, harmonic, odd_harmonic, rational, to_mpf
from . import asymptotic


class Tag(str, enum.Enum):
    S = "S"
    L = "L"
    V = "V"
    Z = "Z"
    W = "W"
    LIN_H = "LIN_H"
    LIN_h = "LIN_h"
    MIX_Hh_K3 = "MIX_Hh_K3"
    ALT_H2_K3 = "ALT_H2_K3"
    H2K_WEIGHTED = "H2K_WEIGHTED"
    H2K_SQ = "H2K_SQ"
    HSQ_K3 = "HSQ_K3"
    HH_K3 = "HH_K3"  # sum H_k^2 / k^3, needed by the even/odd relations

    @classmethod
    def parse(cls, text: str) -> "Tag":
        for tag in cls:
            if tag.value == text:
                return tag
        for tag in cls:
            if tag.value.upper() == text.upper():
                return tag
        raise ValueError(f"unknown series family {text!r}")


ORDERED = {Tag.S, Tag.L, Tag.V, Tag.Z, Tag.W, Tag.LIN_H, Tag.LIN_h}
_MIN_ORDER = {Tag.LIN_H: 2, Tag.LIN_h: 2}


@dataclass(frozen=True)
class Kernel:
    central: int = 0
    harmonics: tuple = ()  # ((name, power), ...) with name in {"H", "h", "H2"}
    linear: tuple = ()  # ((u, v, e), ...) meaning (u k + v)^e
    scale: Rational = field(default_factory=lambda: mpq(1))
    alternating: bool = False

    def __post_init__(self):
        if self.central not in (0, 1):
            raise ValueError("central power must be 0 or 1")
        for name, p in self.harmonics:
            if name not in ("H", "h", "H2") or p < 1:
                raise ValueError(f"bad harmonic factor {(name, p)}")
        for u, v, e in self.linear:
            if u <= 0 or u + v <= 0:
                raise ValueError(f"linear factor {u}k+{v} must be positive for k >= 1")
        object.__setattr__(self, "scale", rational(self.scale))

    @property
    def decay(self) -> Fraction:
        """Exponent alpha of the power decay k^-alpha (log factors aside)."""
        return Fraction(self.central, 2) - sum(Fraction(e) for _, _, e in self.linear)

    def term(self, k: int) -> Rational:
        if k < 1:
            raise ValueError("k must be >= 1")
        t = self.scale
        if self.central:
            t *= central_ratio(k)
        for name, p in self.harmonics:
            x = harmonic(k) if name == "H" else odd_harmonic(k) if name == "h" else harmonic(2 * k)
            t *= x**p
        for u, v, e in self.linear:
            t *= mpq(u * k + v) ** e
        if self.alternating and k % 2 == 0:
            t = -t
        return t

    def partial_sum(self, K: int) -> Rational:
        return exact_partial_sum(self, K)

    def expansion(self, order: int) -> asymptotic.Expansion:
        """Large-k expansion of the unsigned kernel at the ambient precision."""
        exp = asymptotic.Expansion.one(order)
        if self.central:
            exp = exp * asymptotic.central_expansion(order)
        builders = {
            "H": asymptotic.harmonic_expansion,
            "h": asymptotic.odd_harmonic_expansion,
            "H2": asymptotic.double_harmonic_expansion,
        }
        for name, p in self.harmonics:
            factor = builders[name](order)
            for _ in range(p):
                exp = exp * factor
        for u, v, e in self.linear:
            exp = exp * asymptotic.linear_expansion(u, v, e, order)
        return exp.scaled(to_mpf(self.scale))


@dataclass(frozen=True)
class SeriesFamily:
    tag: Tag
    n: int | None = None

    def __post_init__(self):
        tag = self.tag if isinstance(self.tag, Tag) else Tag.parse(self.tag)
        object.__setattr__(self, "tag", tag)
        if tag in ORDERED:
            if self.n is None:
                raise ValueError(f"family {tag.value} needs an order n")
            lo = _MIN_ORDER.get(tag, 1)
            if self.n < lo:
                raise ValueError(f"family {tag.value} needs n >= {lo}, got {self.n}")
        elif self.n is not None:
            raise ValueError(f"family {tag.value} has a fixed order; n must be omitted")

    def __str__(self):
        return self.tag.value if self.n is None else f"{self.tag.value}:{self.n}"

    @classmethod
    def parse(cls, text: str) -> "SeriesFamily":
        """'S:4', 's4', 'HSQ_K3', ..."""
        text = text.strip()
        if ":" in text:
            tag, n = text.split(":", 1)
            return cls(Tag.parse(tag), int(n))
        try:
            return cls(Tag.parse(text))
        except ValueError:
            pass
        i = len(text)
        while i > 0 and text[i - 1].isdigit():
            i -= 1
        if 0 < i < len(text):
            return cls(Tag.parse(text[:i].rstrip("_")), int(text[i:]))
        raise ValueError(f"cannot parse series family {text!r}")

    @property
    def kernel(self) -> Kernel:
        return family_kernel(self)

    def term(self, k: int) -> Rational:
        return self.kernel.term(k)


def family_kernel(spec: SeriesFamily) -> Kernel:
    tag, n = spec.tag, spec.n
    if tag is Tag.S:
        return Kernel(central=1, linear=((1, 0, -n),))
    if tag is Tag.L:
        return Kernel(central=1, linear=((2, 1, -n),))
    if tag is Tag.V:
        return Kernel(central=1, harmonics=(("h", 1),), linear=((1, 0, -n),))
    if tag is Tag.Z:
        return Kernel(central=1, harmonics=(("h", 1),), linear=((2, -1, -n),))
    if tag is Tag.W:
        return Kernel(harmonics=(("h", 2),), linear=((1, 0, -2 * n),))
    if tag is Tag.LIN_H:
        return Kernel(harmonics=(("H", 1),), linear=((1, 0, -n),))
    if tag is Tag.LIN_h:
        return Kernel(harmonics=(("h", 1),), linear=((1, 0, -n),))
    if tag is Tag.MIX_Hh_K3:
        return Kernel(harmonics=(("H", 1), ("h", 1)), linear=((1, 0, -3),))
    if tag is Tag.ALT_H2_K3:
        return Kernel(harmonics=(("H", 2),), linear=((1, 0, -3),), alternating=True)
    if tag is Tag.H2K_WEIGHTED:
        return Kernel(harmonics=(("H", 1), ("H2", 1)), linear=((2, 0, -3),))
    if tag is Tag.H2K_SQ:
        return Kernel(harmonics=(("H2", 2),), linear=((1, 0, -3),))
    if tag is Tag.HSQ_K3:
        return Kernel(harmonics=(("h", 2),), linear=((1, 0, -3),))
    if tag is Tag.HH_K3:
        return Kernel(harmonics=(("H", 2),), linear=((1, 0, -3),))
    raise AssertionError(tag)


def as_kernel(spec) -> Kernel:
    if isinstance(spec, Kernel):
        return spec
    if isinstance(spec, SeriesFamily):
        return spec.kernel
    raise TypeError(f"expected SeriesFamily or Kernel, got {type(spec).__name__}")


# ---------------------------------------------------------------------------
# exact partial sums over a common denominator

def lcm_upto(n: int) -> mpz:
    out = mpz(1)
    for p in range(2, n + 1):
        if gmpy2.is_prime(p):
            q = p
            while q * p <= n:
                q *= p
            out *= q
    return out


def exact_partial_sum(kernel: Kernel, K: int) -> Rational:
    """sum_{k=1..K} term(k) exactly.

    Each factor is kept as an integer numerator over a denominator fixed for
    the whole range (4^K for c_k, lcm(1..2K) for harmonic numbers, the lcm of
    the linear factor values), so the loop is pure integer arithmetic and the
    single reduction happens at the end.
    """
    if K < 0:
        raise ValueError("K must be >= 0")
    if K == 0:
        return mpq(0)
    names = [name for name, _ in kernel.harmonics]
    span = 2 * K if any(n in ("h", "H2") for n in names) else K
    D = lcm_upto(span) if names else mpz(1)

    lin_num = []  # per factor: (u, v, e, L) with value = numerator / L
    denom = mpz(1)
    for u, v, e in kernel.linear:
        if e < 0:
            L = mpz(1)
            for k in range(1, K + 1):
                L = gmpy2.lcm(L, u * k + v)
            L = L ** (-e)
            denom *= L
        else:
            L = mpz(1)
        lin_num.append((u, v, e, L))
    if kernel.central:
        denom *= mpz(4) ** K
    for _, p in kernel.harmonics:
        denom *= D**p

    C = mpz(4) ** K
    xH = xh = xH2 = mpz(0)
    total = mpz(0)
    for k in range(1, K + 1):
        C = C * (2 * k - 1) // (2 * k)
        xH += D // k
        xh += D // (2 * k - 1)
        xH2 += D // (2 * k - 1) + D // (2 * k)
        t = C if kernel.central else mpz(1)
        for name, p in kernel.harmonics:
            t *= (xH if name == "H" else xh if name == "h" else xH2) ** p
        for u, v, e, L in lin_num:
            w = u * k + v
            t = t * (L // w ** (-e)) if e < 0 else t * mpz(w) ** e
        if kernel.alternating and k % 2 == 0:
            total -= t
        else:
            total += t
    return kernel.scale * mpq(total, denom)
