"""
Exact sparse row reduction over the rationals.

Rows are ``{column: int}`` dicts.  Rational input is cleared of denominators
row by row, which leaves the row space unchanged.  Elimination is
fraction-free: ``r <- (lead_p/g) * r - (r_c/g) * p`` followed by removal of
the row content, so no ``Fraction`` is ever created inside the loop.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Hashable, Iterable, Mapping, Sequence

SparseRow = dict[int, int]


def _content(*parts: Mapping) -> int:
    g = 0
    for part in parts:
        for v in part.values():
            g = gcd(g, v)
            if g == 1:
                return 1
    return g


def to_int_row(row: Mapping[int, Fraction] | Sequence) -> tuple[SparseRow, int]:
    """Sparse integer row proportional to ``row`` and the multiplier used."""
    if not isinstance(row, Mapping):
        row = {k: v for k, v in enumerate(row) if v}
    den = 1
    for v in row.values():
        if isinstance(v, Fraction) and v.denominator != 1:
            den = den * v.denominator // gcd(den, v.denominator)
    out = {k: int(Fraction(v) * den) for k, v in row.items() if v}
    return out, den


class Echelon:
    """Incrementally maintained row echelon form.

    The pivot of a row is its smallest column index, so pivots follow the
    column order fixed by the caller.  With ``track=True`` every stored row
    carries its expression as an integer combination of the inserted rows.
    """

    def __init__(self, ncols: int, track: bool = False):
        self.ncols = ncols
        self.track = track
        self.pivots: dict[int, SparseRow] = {}
        self.combos: dict[int, dict[Hashable, int]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def is_full(self) -> bool:
        return len(self.pivots) == self.ncols

    def reduce(self, row: SparseRow, combo: dict[Hashable, int] | None = None):
        """Eliminate leading entries against stored pivots.

        Returns the remainder (empty iff ``row`` is in the span) and the
        updated combination when tracking.
        """
        row = dict(row)
        combo = dict(combo) if combo is not None else None
        pivots = self.pivots
        while row:
            c = min(row)
            p = pivots.get(c)
            if p is None:
                break
            v = row[c]
            lead = p[c]
            g = gcd(v, lead)
            mr, mp = lead // g, v // g
            if mr != 1:
                if mr == -1:
                    row = {k: -x for k, x in row.items()}
                else:
                    row = {k: x * mr for k, x in row.items()}
            for k, x in p.items():
                y = row.get(k, 0) - mp * x
                if y:
                    row[k] = y
                else:
                    del row[k]
            if combo is not None:
                pc = self.combos[c]
                if mr != 1:
                    combo = {t: x * mr for t, x in combo.items()}
                for t, x in pc.items():
                    y = combo.get(t, 0) - mp * x
                    if y:
                        combo[t] = y
                    else:
                        combo.pop(t, None)
            if mr != 1 and row:
                h = _content(row, combo) if combo is not None else _content(row)
                if h > 1:
                    row = {k: x // h for k, x in row.items()}
                    if combo is not None:
                        combo = {t: x // h for t, x in combo.items()}
        return row, combo

    def add(self, row: SparseRow, tag: Hashable | None = None) -> bool:
        """Insert a row; True iff it increased the rank."""
        if self.is_full():
            return False
        combo = {tag: 1} if self.track else None
        rest, combo = self.reduce(row, combo)
        if not rest:
            return False
        h = _content(rest, combo) if combo is not None else _content(rest)
        if rest[min(rest)] < 0:
            h = -h
        if h != 1:
            rest = {k: x // h for k, x in rest.items()}
            if combo is not None:
                combo = {t: x // h for t, x in combo.items()}
        c = min(rest)
        self.pivots[c] = rest
        if combo is not None:
            self.combos[c] = combo
        return True

    def contains(self, row: SparseRow) -> bool:
        rest, _ = self.reduce(row)
        return not rest

    def solve(self, row: SparseRow) -> dict[Hashable, Fraction] | None:
        """Coefficients expressing ``row`` through the inserted rows, or None."""
        if not self.track:
            raise ValueError("solve needs an Echelon built with track=True")
        target = object()
        rest, combo = self.reduce(row, {target: 1})
        if rest:
            return None
        t = combo.pop(target)
        return {tag: Fraction(-x, t) for tag, x in combo.items()}

    def basis(self) -> list[SparseRow]:
        return [self.pivots[c] for c in sorted(self.pivots)]


def exact_rank(rows: Iterable[Mapping[int, Fraction] | Sequence], ncols: int | None = None):
    """Rank over Q and an echelon basis of the row space.

    Accepts dense sequences or sparse ``{column: value}`` mappings with int
    or Fraction entries.
    """
    int_rows = [to_int_row(r)[0] for r in rows]
    if ncols is None:
        ncols = 1 + max((max(r) for r in int_rows if r), default=-1)
    ech = Echelon(ncols)
    for r in int_rows:
        ech.add(r)
    return ech.rank, ech.basis()
