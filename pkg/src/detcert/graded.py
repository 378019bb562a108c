"""
Graded membership engine for tangent modules of quasihomogeneous families.

For a family of type (D; w) the matrix module M_mn(O_N) splits into levels:
level e holds the matrices whose (i, j) entry is weighted homogeneous of
degree d_ij + e.  Every generator lives in a single level (its shift), so
membership, codimension and "contains a power of the maximal ideal" reduce
to exact rank computations on finitely many level slices.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

from detcert.errors import DegenerateEntry, LevelError
from detcert.linalg import Echelon, SparseRow
from detcert.matrix_family import Cell, DegreeMatrix, Generator, GeneratorSet, MatrixFamily
from detcert.poly import Monomial, Poly, as_weights, monomials_of_wdeg, wdeg

DEFAULT_LEVEL_SPAN = 30


class Mode(str, enum.Enum):
    STRICT = "strict"      # M*J(F) + O{R, C}
    EXTENDED = "extended"  # J(F) + O{R, C}


GenLike = Union[GeneratorSet, Sequence[Generator]]


def _degrees(D) -> tuple[tuple[int, ...], ...]:
    d = D.d if isinstance(D, DegreeMatrix) else tuple(tuple(r) for r in D)
    if any(x is None for r in d for x in r):
        raise ValueError("degree matrix has unresolved zero entries; run validate_whomog first")
    return d


def _check_units(d, allow_units: bool):
    if allow_units:
        return
    bad = [(i, j) for i, r in enumerate(d) for j, x in enumerate(r) if x <= 0]
    if bad:
        cells = ", ".join(f"({i + 1},{j + 1})" for i, j in bad)
        raise DegenerateEntry(f"entries of non-positive degree (unit entries) are not supported: {cells}")


@dataclass(frozen=True)
class Target:
    """A basis element x^alpha * E_ij of some level."""

    monomial: Monomial
    cell: Cell
    level: int

    def as_matrix(self, m: int, n: int) -> tuple[tuple[Poly, ...], ...]:
        N = len(self.monomial)
        return tuple(
            tuple(Poly.monomial(self.monomial) if (i, j) == self.cell else Poly.zero(N) for j in range(n))
            for i in range(m)
        )


class _PreparedGen:
    __slots__ = ("index", "gen", "den", "cells")

    def __init__(self, index: int, gen: Generator):
        self.index = index
        self.gen = gen
        coeffs = [c for _, _, p in gen.nonzero_cells() for c in p.terms.values()]
        den = 1
        for c in coeffs:
            den = den * c.denominator // _gcd(den, c.denominator)
        self.den = den
        self.cells = [
            (i, j, [(mono, int(c * den)) for mono, c in p.items()])
            for i, j, p in gen.nonzero_cells()
        ]


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _prepare(gens: GenLike) -> list[_PreparedGen]:
    seq = gens.all() if isinstance(gens, GeneratorSet) else tuple(gens)
    return [_PreparedGen(k, g) for k, g in enumerate(seq) if any(True for _ in g.nonzero_cells())]


@dataclass
class LevelSlice:
    """Level e of the module: ambient basis and the spanning generator multiples."""

    level: int
    ambient_basis: list[tuple[Monomial, Cell]]
    index: dict[tuple[Cell, Monomial], int]
    rows: list[SparseRow]
    row_tags: list[tuple[int, Monomial, int]]  # (generator index, multiplier, integer scale)

    @property
    def ambient_dim(self) -> int:
        return len(self.ambient_basis)

    def echelon(self, track: bool = False) -> Echelon:
        ech = Echelon(self.ambient_dim, track=track)
        for k, row in enumerate(self.rows):
            ech.add(row, k)
            if not track and ech.is_full():
                break
        return ech

    def target(self, col: int) -> Target:
        mono, cell = self.ambient_basis[col]
        return Target(mono, cell, self.level)


def _build(prepared: list[_PreparedGen], d, w, e: int, mode: Mode) -> LevelSlice:
    m, n = len(d), len(d[0])
    N = len(w)
    basis: list[tuple[Monomial, Cell]] = []
    index: dict[tuple[Cell, Monomial], int] = {}
    for i in range(m):
        for j in range(n):
            for mono in monomials_of_wdeg(N, w, e + d[i][j]):
                index[((i, j), mono)] = len(basis)
                basis.append((mono, (i, j)))
    rows: list[SparseRow] = []
    tags = []
    if basis:
        for pg in prepared:
            deg = e - pg.gen.shift
            if deg < 0 or (deg == 0 and mode is Mode.STRICT and pg.gen.jacobian):
                continue
            for beta in monomials_of_wdeg(N, w, deg):
                row: SparseRow = {}
                for i, j, terms in pg.cells:
                    for mono, c in terms:
                        key = ((i, j), tuple(a + b for a, b in zip(mono, beta)))
                        col = index.get(key)
                        if col is None:
                            raise AssertionError(
                                f"generator {pg.gen.label} is not homogeneous of shift {pg.gen.shift}"
                            )
                        row[col] = row.get(col, 0) + c
                rows.append({k: v for k, v in row.items() if v})
                tags.append((pg.index, beta, pg.den))
    return LevelSlice(e, basis, index, rows, tags)


def build_slice(gens: GenLike, D, w, e: int, mode: Mode | str = Mode.STRICT) -> LevelSlice:
    """Level-e slice of the module generated by ``gens``.

    In strict mode Jacobian generators only enter with multipliers in the
    maximal ideal.
    """
    d = _degrees(D)
    return _build(_prepare(gens), d, as_weights(w), e, Mode(mode))


@dataclass(frozen=True)
class LevelRecord:
    level: int
    ambient_dim: int
    rank: int

    @property
    def full(self) -> bool:
        return self.rank == self.ambient_dim

    @property
    def quotient_dim(self) -> int:
        return self.ambient_dim - self.rank


@dataclass
class MembershipCertificate:
    """Outcome of the search for M^k * O^{mn} inside a graded module.

    ``verdict`` is "Verified" or "NotVerifiedUpTo"; ``bound`` is the highest
    level scanned.  When verified, every level from ``window_start`` on is
    fully covered and ``k`` is the least exponent with all x^alpha E_ij,
    |alpha| = k, in the module.
    """

    verdict: str
    mode: str
    bound: int
    covered_levels: list[LevelRecord]
    window_start: int | None = None
    window_width: int = 1
    k: int | None = None
    obstruction: Target | None = None

    @property
    def verified(self) -> bool:
        return self.verdict == "Verified"


def _first_non_member(sl: LevelSlice, ech: Echelon) -> Target:
    for col in range(sl.ambient_dim):
        if col not in ech.pivots or not ech.contains({col: 1}):
            return sl.target(col)
    raise AssertionError("level is fully covered")


def _scan(gens: GenLike, D, w, mode, level_bound, allow_units, keep_echelons=True):
    d = _degrees(D)
    _check_units(d, allow_units)
    w = as_weights(w)
    mode = Mode(mode)
    prepared = _prepare(gens)
    dmax = max(x for r in d for x in r)
    dmin = min(x for r in d for x in r)
    e_min = -dmax
    if level_bound is None:
        level_bound = e_min + DEFAULT_LEVEL_SPAN
    width = max(w)
    records: list[LevelRecord] = []
    slices: dict[int, tuple[LevelSlice, Echelon]] = {}
    run = 0
    window = None
    for e in range(e_min, level_bound + 1):
        sl = _build(prepared, d, w, e, mode)
        ech = sl.echelon()
        records.append(LevelRecord(e, sl.ambient_dim, ech.rank))
        if keep_echelons:
            slices[e] = (sl, ech)
        run = run + 1 if ech.is_full() else 0
        # constants x^0 E_ij sit at level -d_ij and cannot be reached by
        # multiplying lower targets, so the window must end at or above them
        if run >= width and e >= -dmin:
            window = e - width + 1
            break
    return d, w, mode, level_bound, records, slices, window


def _least_k(d, w, records: list[LevelRecord], slices, window: int) -> int:
    full_from = window
    by_level = {r.level: r for r in records}
    while full_from - 1 in by_level and by_level[full_from - 1].full:
        full_from -= 1
    N = len(w)
    wmin = min(w)
    m, n = len(d), len(d[0])
    k_upper = max(1, max(-(-(full_from + d[i][j]) // wmin) for i in range(m) for j in range(n)))
    unit = (1,) * N
    for k in range(1, k_upper):
        ok = True
        for alpha in monomials_of_wdeg(N, unit, k):
            wa = wdeg(alpha, w)
            for i in range(m):
                for j in range(n):
                    lev = wa - d[i][j]
                    if lev >= full_from:
                        continue
                    sl, ech = slices[lev]
                    col = sl.index[((i, j), alpha)]
                    if not ech.contains({col: 1}):
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            return k
    return k_upper


def check_membership(
    gens: GenLike,
    D,
    w,
    mode: Mode | str = Mode.STRICT,
    level_bound: int | None = None,
    allow_units: bool = False,
) -> MembershipCertificate:
    """Scan levels upward until ``max(w)`` consecutive levels are fully covered.

    A full window [e0, e0 + max(w) - 1] covers every higher level: any target
    above it is x_k times a target at most w_k levels lower.  ``level_bound``
    is the last level scanned (default: lowest level + 30).
    """
    d, w, mode, bound, records, slices, window = _scan(gens, D, w, mode, level_bound, allow_units)
    if window is None:
        top = max((r for r in records if not r.full), key=lambda r: r.level, default=None)
        obstruction = None
        if top is not None:
            sl, ech = slices[top.level]
            obstruction = _first_non_member(sl, ech)
        return MembershipCertificate("NotVerifiedUpTo", mode.value, bound, records,
                                     window_width=max(w), obstruction=obstruction)
    k = _least_k(d, w, records, slices, window)
    return MembershipCertificate("Verified", mode.value, bound, records, window, max(w), k)


@dataclass
class CodimReport:
    """dim_C of the quotient of M_mn(O_N) by a graded module, level by level.

    ``total`` is None when no covering window was found below ``bound``.
    """

    total: int | None
    per_level: list[tuple[int, int]]
    bound: int
    mode: str

    @property
    def infinite(self) -> bool:
        return self.total is None


def codimension(
    gens: GenLike,
    D,
    w,
    mode: Mode | str = Mode.EXTENDED,
    level_bound: int | None = None,
    allow_units: bool = False,
) -> CodimReport:
    _, _, mode, bound, records, _, window = _scan(
        gens, D, w, mode, level_bound, allow_units, keep_echelons=False
    )
    per_level = [(r.level, r.quotient_dim) for r in records]
    total = sum(q for _, q in per_level) if window is not None else None
    return CodimReport(total, per_level, bound, mode.value)


def _as_rows(target) -> tuple[tuple[Poly, ...], ...]:
    if isinstance(target, MatrixFamily):
        return target.entries
    return tuple(tuple(r) for r in target)


def level_of(target, D, w) -> int | None:
    """The level of a shifted-homogeneous matrix (None for the zero matrix)."""
    d = _degrees(D)
    levels = {
        wdeg(mono, w) - d[i][j]
        for i, row in enumerate(_as_rows(target))
        for j, p in enumerate(row)
        for mono in p.terms
    }
    if len(levels) > 1:
        raise LevelError(f"target mixes levels {sorted(levels)}")
    return levels.pop() if levels else None


@dataclass(frozen=True)
class WitnessTerm:
    generator: int
    label: str
    multiplier: Monomial
    coefficient: Fraction


def member(target, gens: GenLike, D, w, mode: Mode | str = Mode.STRICT):
    """Decide target in module; on success also return the combination.

    Returns ``(True, witness)`` or ``(False, None)``; the witness is a list
    of WitnessTerm whose sum coefficient * x^multiplier * generator equals
    the target.
    """
    w = as_weights(w)
    rows = _as_rows(target)
    e = level_of(rows, D, w)
    if e is None:
        return True, []
    seq = gens.all() if isinstance(gens, GeneratorSet) else tuple(gens)
    sl = build_slice(seq, D, w, e, mode)
    ech = sl.echelon(track=True)
    vec: dict[int, Fraction] = {}
    for i, row in enumerate(rows):
        for j, p in enumerate(row):
            for mono, c in p.items():
                vec[sl.index[((i, j), mono)]] = c
    den = 1
    for c in vec.values():
        den = den * c.denominator // _gcd(den, c.denominator)
    sol = ech.solve({k: int(v * den) for k, v in vec.items()})
    if sol is None:
        return False, None
    witness = []
    for tag, coef in sorted(sol.items()):
        if not coef:
            continue
        gi, beta, scale = sl.row_tags[tag]
        witness.append(WitnessTerm(gi, seq[gi].label, beta, coef * scale / den))
    return True, witness


def expand_witness(witness: list[WitnessTerm], gens: GenLike, m: int, n: int, nvars: int):
    """Recombine a witness into the matrix it certifies."""
    seq = gens.all() if isinstance(gens, GeneratorSet) else tuple(gens)
    out = [[Poly.zero(nvars) for _ in range(n)] for _ in range(m)]
    for t in witness:
        g = seq[t.generator]
        for i, j, p in g.nonzero_cells():
            out[i][j] = out[i][j] + p.shift(t.multiplier, t.coefficient)
    return tuple(tuple(r) for r in out)
