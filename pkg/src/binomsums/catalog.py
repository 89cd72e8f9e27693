"""Frozen table of the known closed forms, in canonical text."""

from __future__ import annotations

import functools
from dataclasses import dataclass

from .closedform import ClosedForm, cf_parse
from .series.kernels import SeriesFamily, Tag

# (family tag, order, closed form, source label)
_TABLE = (
    ("S", 1, "2*ln2", "Eq (2)"),
    ("S", 2, "-2*ln2^2 + z2", "Eq (3)"),
    ("S", 3, "-2*ln2*z2 + 4/3*ln2^3 + 2*z3", "Eq (25)"),
    ("S", 4, "-4*ln2*z3 + 2*ln2^2*z2 - 2/3*ln2^4 + 9/4*z4", "Eq (29)"),
    ("S", 5, "-9/2*ln2*z4 + 4*ln2^2*z3 - 4/3*ln2^3*z2 + 4/15*ln2^5 - 2*z2*z3 + 6*z5", "Eq (32)"),
    ("S", 6, "4*ln2*z2*z3 - 12*ln2*z5 + 9/2*ln2^2*z4 - 8/3*ln2^3*z3 + 2/3*ln2^4*z2 - 4/45*ln2^6 - 2*z3^2 + 79/16*z6", "Eq (33)"),
    ("S", 7, "4*ln2*z3^2 - 79/8*ln2*z6 - 4*ln2^2*z2*z3 + 12*ln2^2*z5 - 3*ln2^3*z4 + 4/3*ln2^4*z3 - 4/15*ln2^5*z2 + 8/315*ln2^7 - 6*z2*z5 - 9/2*z3*z4 + 18*z7", "Eq (34)"),
    ("L", 1, "-1 + 1/2*pi", "Eq (36)"),
    ("L", 2, "-1 + 1/2*pi*ln2", "Eq (37)"),
    ("L", 3, "-1 + 1/4*pi*ln2^2 + 1/8*pi*z2", "Eq (38)"),
    ("L", 4, "-1 + 1/12*pi*ln2^3 + 1/8*pi*z3 + 1/48*pi^3*ln2", "Eq (54)"),
    ("L", 5, "-1 + 1/8*pi*ln2*z3 + 1/48*pi*ln2^4 + 19/128*pi*z4 + 1/96*pi^3*ln2^2", "Eq (55)"),
    ("V", 1, "3/2*z2", "Eq (57)"),
    ("V", 2, "-3*ln2*z2 + 7/2*z3", "Eq (71)"),
    ("V", 3, "-7*ln2*z3 + 3*ln2^2*z2 + 15/4*z4", "Eq (73)"),
    ("V", 4, "-15/2*ln2*z4 + 7*ln2^2*z3 - 2*ln2^3*z2 - 13/2*z2*z3 + 31/2*z5", "Eq (74)"),
    ("V", 5, "13*ln2*z2*z3 - 31*ln2*z5 + 15/2*ln2^2*z4 - 14/3*ln2^3*z3 + ln2^4*z2 - 7*z3^2 + 399/32*z6", "Eq (75)"),
    ("Z", 1, "1/2*pi", "Eq (77)"),
    ("Z", 2, "-1/2*pi + pi*ln2", "Eq (80)"),
    ("Z", 3, "1/2*pi - pi*ln2 + 3/4*pi*ln2^2", "Eq (81)"),
    ("Z", 4, "-1/2*pi + pi*ln2 + 1/8*pi*ln2*z2 - 3/4*pi*ln2^2 + 1/3*pi*ln2^3 + 1/16*pi*z3", "Eq (82)"),
    ("W", 1, "45/16*z4", "Eq (96)"),
    ("W", 2, "-49/8*z3^2 + 315/32*z6", "Eq (97)"),
    ("W", 3, "49/4*z2*z3^2 - 217/4*z3*z5 + 315/8*z8", "Eq (98)"),
    ("LIN_H", 2, "2*z3", "Eq (23)"),
    ("LIN_h", 2, "7/4*z3", "Eq (24)"),
    ("LIN_h", 3, "7*ln2*z3 - 2*ln2^2*z2 + 1/3*ln2^4 - 53/8*z4 + 8*Li4", "Eq (100)"),
    ("HSQ_K3", None, "7/4*z2*z3 - 31/16*z5", "Eq (99)"),
    ("H2K_WEIGHTED", None, "-2*ln2*Li4 - 7/8*ln2^2*z3 + 1/3*ln2^3*z2 - 1/15*ln2^5 - 1/16*z2*z3 + 307/128*z5 - 2*Li5", "Eq (101)"),
    ("ALT_H2_K3", None, "4*ln2*Li4 + 7/4*ln2^2*z3 - 2/3*ln2^3*z2 + 2/15*ln2^5 - 11/8*z2*z3 - 19/32*z5 + 4*Li5", "Eq (102)"),
    ("MIX_Hh_K3", None, "-16*ln2*Li4 - 7*ln2^2*z3 + 8/3*ln2^3*z2 - 8/15*ln2^5 + 279/16*z5 - 16*Li5", "Eq (103)"),
)


class CatalogLookupError(LookupError):
    pass


@dataclass(frozen=True)
class CatalogEntry:
    family: SeriesFamily
    closed_form: ClosedForm
    source_label: str
    disputed: bool = False

    @property
    def key(self) -> str:
        return str(self.family)


@functools.lru_cache(maxsize=None)
def _entries() -> dict:
    out = {}
    for tag, n, text, label in _TABLE:
        fam = SeriesFamily(Tag(tag), n)
        if fam in out:
            raise AssertionError(f"duplicate catalog entry {fam}")
        out[fam] = CatalogEntry(fam, cf_parse(text), label)
    return out


def catalog_text(family: SeriesFamily) -> str:
    for tag, n, text, _ in _TABLE:
        if SeriesFamily(Tag(tag), n) == family:
            return text
    raise CatalogLookupError(f"no catalog entry for {family}")


def catalog_get(family, n: int | None = None) -> CatalogEntry:
    """Entry for a family given as SeriesFamily, Tag or text ('S', 4 / 'S:4')."""
    try:
        if isinstance(family, SeriesFamily):
            fam = family
        elif isinstance(family, Tag):
            fam = SeriesFamily(family, n)
        elif n is None:
            fam = SeriesFamily.parse(family)
        else:
            fam = SeriesFamily(Tag.parse(family), n)
    except ValueError as exc:
        raise CatalogLookupError(str(exc)) from None
    try:
        return _entries()[fam]
    except KeyError:
        raise CatalogLookupError(f"no catalog entry for {fam}") from None


def catalog_all() -> list:
    return list(_entries().values())
