"""Exact closed forms over the basis {pi, ln 2, zeta(m), Li_m(1/2)}.

Text format::

    expr   := term (('+' | '-') term)*
    term   := coeff ('*' factor)* | factor ('*' factor)*
    factor := atom ('^' uint)?
    atom   := 'pi' | 'ln2' | 'z' uint | 'Li' uint
    coeff  := int | int '/' uint

Whitespace is ignored.  A sign directly in front of a term is accepted, so
``-pi`` and ``-1*pi`` read the same.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import mpmath
from gmpy2 import mpq

from .numerics import (
    PrecisionContext,
    Rational,
    Real,
    const_li_half,
    const_ln2,
    const_pi,
    const_zeta,
    rational,
    to_mpf,
)

PI, LN2, ZETA, LI = 0, 1, 2, 3


@dataclass(frozen=True, order=True)
class ConstSymbol:
    kind: int
    m: int = 0

    def __post_init__(self):
        if self.kind in (PI, LN2):
            if self.m:
                raise ValueError("pi and ln2 take no index")
        elif self.kind == ZETA:
            if self.m < 2:
                raise ValueError(f"zeta({self.m}) diverges")
        elif self.kind == LI:
            if self.m == 1:
                raise ValueError("Li1(1/2) is ln2; use ln2")
            if self.m < 2:
                raise ValueError(f"Li{self.m}(1/2) is not in the basis")
        else:
            raise ValueError(f"unknown symbol kind {self.kind}")

    def __str__(self):
        return ("pi", "ln2", f"z{self.m}", f"Li{self.m}")[self.kind]

    def value(self, ctx: PrecisionContext) -> mpmath.mpf:
        if self.kind == PI:
            return const_pi(ctx).value
        if self.kind == LN2:
            return const_ln2(ctx).value
        if self.kind == ZETA:
            return const_zeta(self.m, ctx).value
        return const_li_half(self.m, ctx).value


Pi = ConstSymbol(PI)
Ln2 = ConstSymbol(LN2)


def Zeta(m: int) -> ConstSymbol:
    return ConstSymbol(ZETA, m)


def LiHalf(m: int) -> ConstSymbol:
    return ConstSymbol(LI, m)


@dataclass(frozen=True)
class Monomial:
    coeff: Rational
    powers: tuple  # ((ConstSymbol, exponent), ...) sorted by symbol

    @property
    def key(self) -> tuple:
        return tuple((s.kind, s.m, e) for s, e in self.powers)

    def format(self) -> str:
        """Unsigned text of the monomial; the sign is handled by the caller."""
        c = abs(self.coeff)
        body = "*".join(str(s) if e == 1 else f"{s}^{e}" for s, e in self.powers)
        if not body:
            return _fmt_rational(c)
        if c == 1:
            return body
        return f"{_fmt_rational(c)}*{body}"


def _fmt_rational(q: Rational) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _merge_powers(a: Iterable, b: Iterable) -> tuple:
    acc: dict = {}
    for s, e in list(a) + list(b):
        acc[s] = acc.get(s, 0) + e
    return tuple(sorted(acc.items()))


@dataclass(frozen=True)
class ClosedForm:
    monomials: tuple = ()

    @classmethod
    def from_terms(cls, terms: Iterable) -> "ClosedForm":
        """Collect like terms of (coeff, powers) pairs into canonical form."""
        acc: dict = {}
        for coeff, powers in terms:
            p = _merge_powers(powers, ())
            acc[p] = acc.get(p, mpq(0)) + rational(coeff)
        monos = [Monomial(c, p) for p, c in acc.items() if c != 0]
        monos.sort(key=lambda m: m.key)
        return cls(tuple(monos))

    @classmethod
    def constant(cls, q) -> "ClosedForm":
        return cls.from_terms([(q, ())])

    @classmethod
    def symbol(cls, s: ConstSymbol, power: int = 1, coeff=1) -> "ClosedForm":
        return cls.from_terms([(coeff, ((s, power),))])

    def _terms(self):
        return [(m.coeff, m.powers) for m in self.monomials]

    def __add__(self, other):
        other = _as_cf(other)
        if other is None:
            return NotImplemented
        return ClosedForm.from_terms(self._terms() + other._terms())

    __radd__ = __add__

    def __neg__(self):
        return ClosedForm.from_terms([(-c, p) for c, p in self._terms()])

    def __sub__(self, other):
        other = _as_cf(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ClosedForm):
            return ClosedForm.from_terms(
                (a.coeff * b.coeff, _merge_powers(a.powers, b.powers))
                for a in self.monomials
                for b in other.monomials
            )
        try:
            q = rational(other)
        except TypeError:
            return NotImplemented
        return ClosedForm.from_terms([(c * q, p) for c, p in self._terms()])

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = ClosedForm.constant(1)
        for _ in range(n):
            out = out * self
        return out

    def symbols(self) -> set:
        return {s for m in self.monomials for s, _ in m.powers}

    def evaluate(self, ctx: PrecisionContext) -> Real:
        return cf_evaluate(self, ctx)

    def __str__(self):
        return cf_format(self)


def _as_cf(x):
    if isinstance(x, ClosedForm):
        return x
    try:
        return ClosedForm.constant(rational(x))
    except TypeError:
        return None


def cf_evaluate(cf: ClosedForm, ctx: PrecisionContext) -> Real:
    """Numeric value with every constant computed at ctx.digits + guard."""
    with ctx.workdps():
        cache: dict = {}
        total = []
        for mono in cf.monomials:
            v = to_mpf(mono.coeff)
            for s, e in mono.powers:
                if s not in cache:
                    cache[s] = s.value(ctx)
                v *= cache[s] ** e
            total.append(v)
        return Real(mpmath.fsum(total), ctx)


def cf_format(cf: ClosedForm) -> str:
    if not cf.monomials:
        return "0"
    parts = []
    for i, mono in enumerate(cf.monomials):
        neg = mono.coeff < 0
        if i == 0:
            parts.append(("-" if neg else "") + mono.format())
        else:
            parts.append((" - " if neg else " + ") + mono.format())
    return "".join(parts)


# ---------------------------------------------------------------------------
# parser

class ClosedFormSyntaxError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        # compacted string plus map back to positions in the original
        self.chars = [ch for ch in text if not ch.isspace()]
        self.where = [i for i, ch in enumerate(text) if not ch.isspace()]
        self.i = 0

    def pos(self, i: int | None = None) -> int:
        i = self.i if i is None else i
        return self.where[i] if i < len(self.where) else len(self.text)

    def error(self, message: str, i: int | None = None):
        raise ClosedFormSyntaxError(message, self.pos(i), self.text)

    def peek(self) -> str:
        return self.chars[self.i] if self.i < len(self.chars) else ""

    def startswith(self, word: str) -> bool:
        return "".join(self.chars[self.i : self.i + len(word)]) == word

    def uint(self, what: str) -> int:
        start = self.i
        while self.peek().isdigit():
            self.i += 1
        if start == self.i:
            self.error(f"expected {what}")
        return int("".join(self.chars[start : self.i]))

    def parse(self) -> ClosedForm:
        if not self.chars:
            self.error("empty expression")
        terms = [self.term(sign=1)]
        while self.i < len(self.chars):
            op = self.peek()
            if op not in "+-":
                self.error(f"unexpected {op!r}")
            self.i += 1
            terms.append(self.term(sign=1 if op == "+" else -1))
        return ClosedForm.from_terms(terms)

    def term(self, sign: int):
        if self.peek() in ("+", "-"):
            if self.peek() == "-":
                sign = -sign
            self.i += 1
        coeff = mpq(1)
        powers = []
        if self.peek().isdigit():
            num = self.uint("integer")
            den = 1
            if self.peek() == "/":
                self.i += 1
                at = self.i
                den = self.uint("denominator")
                if den == 0:
                    self.error("zero denominator", at)
            coeff = mpq(num, den)
            if self.peek() != "*":
                return sign * coeff, ()
            self.i += 1
        powers.append(self.factor())
        while self.peek() == "*":
            self.i += 1
            powers.append(self.factor())
        return sign * coeff, tuple(powers)

    def factor(self):
        sym = self.atom()
        power = 1
        if self.peek() == "^":
            self.i += 1
            at = self.i
            power = self.uint("exponent")
            if power == 0:
                self.error("exponent must be positive", at)
        return sym, power

    def atom(self) -> ConstSymbol:
        start = self.i
        if self.startswith("pi"):
            self.i += 2
            return Pi
        if self.startswith("ln2"):
            self.i += 3
            return Ln2
        if self.startswith("Li"):
            self.i += 2
            m = self.uint("polylog order after 'Li'")
            if m == 1:
                self.error("Li1(1/2) equals ln 2; use ln2", start)
            if m < 2:
                self.error(f"Li{m} is not in the basis", start)
            return LiHalf(m)
        if self.peek() == "z":
            self.i += 1
            m = self.uint("zeta argument after 'z'")
            if m == 1:
                self.error("zeta(1) diverges", start)
            if m < 2:
                self.error(f"zeta({m}) is not in the basis", start)
            return Zeta(m)
        self.error("expected pi, ln2, z<m> or Li<m>")


def cf_parse(text: str) -> ClosedForm:
    return _Parser(text).parse()
