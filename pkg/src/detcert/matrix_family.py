"""
Polynomial matrix families F: (C^N, 0) -> M_mn.

Degree matrices and the weighted homogeneous type check, minors, rank strata
and the generators of the tangent spaces live here.  Indices are 0-based in
code; messages print them 1-based.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterator, Sequence

from detcert.errors import (
    DimensionError,
    NotQuasihomogeneous,
    TypeRelationViolated,
    UnconstrainedZeroEntry,
)
from detcert.poly import Poly, Weights, as_weights, default_names, fil, parse, unit_weights, wdeg

Cell = tuple[int, int]


@dataclass(frozen=True)
class MatrixFamily:
    """An m x n matrix of polynomials in N variables, with weights."""

    entries: tuple[tuple[Poly, ...], ...]
    weights: Weights
    letter: str = "x"

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.entries)
        if not rows or not rows[0]:
            raise DimensionError("a matrix family needs m >= 1 and n >= 1")
        n = len(rows[0])
        if any(len(r) != n for r in rows):
            raise DimensionError("ragged matrix")
        nvars = rows[0][0].nvars
        if any(p.nvars != nvars for r in rows for p in r):
            raise DimensionError("entries disagree on the number of variables")
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "weights", as_weights(self.weights, nvars))

    @classmethod
    def from_rows(
        cls,
        rows: Sequence[Sequence[str | Poly]],
        nvars: int,
        weights: Sequence[int] | None = None,
        letter: str = "x",
    ) -> "MatrixFamily":
        names = default_names(nvars, letter)
        entries = tuple(
            tuple(p if isinstance(p, Poly) else parse(p, names) for p in row) for row in rows
        )
        return cls(entries, tuple(weights) if weights is not None else unit_weights(nvars), letter)

    @property
    def m(self) -> int:
        return len(self.entries)

    @property
    def n(self) -> int:
        return len(self.entries[0])

    @property
    def N(self) -> int:
        return self.entries[0][0].nvars

    @property
    def names(self) -> list[str]:
        return default_names(self.N, self.letter)

    def __getitem__(self, ij: Cell) -> Poly:
        i, j = ij
        return self.entries[i][j]

    def cells(self) -> Iterator[Cell]:
        for i in range(self.m):
            for j in range(self.n):
                yield i, j

    def map(self, fn: Callable[[Poly], Poly], weights: Sequence[int] | None = None,
            letter: str | None = None) -> "MatrixFamily":
        return MatrixFamily(
            tuple(tuple(fn(p) for p in row) for row in self.entries),
            tuple(weights) if weights is not None else self.weights,
            letter or self.letter,
        )

    def __add__(self, other: "MatrixFamily") -> "MatrixFamily":
        if (self.m, self.n, self.N) != (other.m, other.n, other.N):
            raise DimensionError("shape mismatch")
        return MatrixFamily(
            tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.entries, other.entries)),
            self.weights,
            self.letter,
        )

    def is_zero(self) -> bool:
        return all(p.is_zero() for row in self.entries for p in row)

    def to_strings(self) -> list[list[str]]:
        names = self.names
        return [[p.to_str(names) for p in row] for row in self.entries]

    def __str__(self):
        return "[" + ", ".join("[" + ", ".join(r) + "]" for r in self.to_strings()) + "]"


def zero_family(m: int, n: int, nvars: int, weights: Sequence[int] | None = None,
                letter: str = "x") -> MatrixFamily:
    z = Poly.zero(nvars)
    return MatrixFamily(tuple((z,) * n for _ in range(m)),
                        tuple(weights) if weights else unit_weights(nvars), letter)


@dataclass(frozen=True)
class DegreeMatrix:
    """Entry filtrations d_ij.

    ``None`` marks a zero entry whose degree is unconstrained.  After
    ``validate_whomog`` every entry is an int and ``derived`` lists the zero
    entries whose degree was pinned by the type relations.
    """

    d: tuple[tuple[int | None, ...], ...]
    whomog_type_ok: bool
    derived: frozenset[Cell] = field(default_factory=frozenset)

    @property
    def m(self) -> int:
        return len(self.d)

    @property
    def n(self) -> int:
        return len(self.d[0])

    def __getitem__(self, ij: Cell) -> int | None:
        return self.d[ij[0]][ij[1]]

    def as_lists(self) -> list[list[int | None]]:
        return [list(r) for r in self.d]

    def max(self) -> int:
        return max(x for r in self.d for x in r if x is not None)

    def min(self) -> int:
        return min(x for r in self.d for x in r if x is not None)


def _first_relation_failure(d) -> tuple[int, int, int, int] | None:
    m, n = len(d), len(d[0])
    for i, l in combinations(range(m), 2):
        for j, k in combinations(range(n), 2):
            vals = (d[i][j], d[i][k], d[l][j], d[l][k])
            if None in vals:
                continue
            if vals[0] - vals[1] != vals[2] - vals[3]:
                return i, l, j, k
    return None


def degree_matrix(F: MatrixFamily) -> DegreeMatrix:
    d = tuple(
        tuple(None if p.is_zero() else fil(p, F.weights) for p in row) for row in F.entries
    )
    return DegreeMatrix(d, _first_relation_failure(d) is None)


def _solve_shifts(d) -> tuple[list[int | None], list[int | None]]:
    """Solve a_i + b_j = d_ij over the known entries with a_0 = 0.

    Components of the row/column graph that do not contain row 0 are left
    as ``None``.  Raises TypeRelationViolated on an inconsistent cycle.
    """
    m, n = len(d), len(d[0])
    a: list[int | None] = [None] * m
    b: list[int | None] = [None] * n
    a[0] = 0
    queue = deque([("r", 0)])
    while queue:
        side, idx = queue.popleft()
        if side == "r":
            for j in range(n):
                if d[idx][j] is None:
                    continue
                want = d[idx][j] - a[idx]
                if b[j] is None:
                    b[j] = want
                    queue.append(("c", j))
                elif b[j] != want:
                    raise TypeRelationViolated(None, f"inconsistent cycle through ({idx + 1},{j + 1})")
        else:
            for i in range(m):
                if d[i][idx] is None:
                    continue
                want = d[i][idx] - b[idx]
                if a[i] is None:
                    a[i] = want
                    queue.append(("r", i))
                elif a[i] != want:
                    raise TypeRelationViolated(None, f"inconsistent cycle through ({i + 1},{idx + 1})")
    return a, b


def validate_whomog(F: MatrixFamily) -> DegreeMatrix:
    """Check that F is weighted homogeneous of some type (D; w) and return D."""
    offending = [
        (i, j) for i, j in F.cells() if len(F[i, j].wdegs(F.weights)) > 1
    ]
    if offending:
        raise NotQuasihomogeneous(offending)
    raw = degree_matrix(F)
    bad = _first_relation_failure(raw.d)
    if bad is not None:
        raise TypeRelationViolated(bad)
    a, b = _solve_shifts(raw.d)
    loose = [(i, j) for i, j in F.cells() if a[i] is None or b[j] is None]
    if loose:
        raise UnconstrainedZeroEntry(loose)
    d = tuple(tuple(a[i] + b[j] for j in range(F.n)) for i in range(F.m))
    derived = frozenset((i, j) for i, j in F.cells() if raw.d[i][j] is None)
    return DegreeMatrix(d, True, derived)


def _as_int_matrix(D) -> tuple[tuple[int | None, ...], ...]:
    if isinstance(D, DegreeMatrix):
        return D.d
    return tuple(tuple(r) for r in D)


def scaling_shifts(D) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Exponents (a, b) with a_i + b_j = d_ij and a_1 = 0.

    The solution is unique up to a -> a + c, b -> b - c.
    """
    d = _as_int_matrix(D)
    bad = _first_relation_failure(d)
    if bad is not None:
        raise TypeRelationViolated(bad)
    a, b = _solve_shifts(d)
    if None in a or None in b:
        loose = [(i, j) for i in range(len(a)) for j in range(len(b)) if a[i] is None or b[j] is None]
        raise UnconstrainedZeroEntry(loose)
    return tuple(a), tuple(b)


def apply_scaling(F: MatrixFamily, s, D=None) -> MatrixFamily:
    """psi_s * h_s^*(F) * phi_s for the quasihomogeneous scaling.

    ``h_s`` rescales x_k by s^(-w_k); ``psi_s``, ``phi_s`` are the diagonal
    matrices diag(s^a_i), diag(s^b_j) built from ``D`` (default: the type of
    F itself).  For F of type D the result is F exactly.
    """
    s = Fraction(s)
    if s == 0:
        raise ValueError("scaling parameter must be nonzero")
    if s == 1:
        return F
    a, b = scaling_shifts(D if D is not None else validate_whomog(F))
    w = F.weights
    rows = []
    for i in range(F.m):
        row = []
        for j in range(F.n):
            row.append(Poly(
                {mono: c * s ** (a[i] + b[j] - wdeg(mono, w)) for mono, c in F[i, j].items()},
                F.N,
            ))
        rows.append(tuple(row))
    return MatrixFamily(tuple(rows), w, F.letter)


def apply_scaling_symbolic(F: MatrixFamily, D=None) -> MatrixFamily:
    """The scaled family with s kept as an extra, last variable.

    Raises ValueError if some term would need a negative power of s.
    """
    a, b = scaling_shifts(D if D is not None else validate_whomog(F))
    w = F.weights
    rows = []
    for i in range(F.m):
        row = []
        for j in range(F.n):
            terms = {}
            for mono, c in F[i, j].items():
                e = a[i] + b[j] - wdeg(mono, w)
                if e < 0:
                    raise ValueError(f"term at ({i + 1},{j + 1}) needs s^{e}")
                terms[mono + (e,)] = c
            row.append(Poly(terms, F.N + 1))
        rows.append(tuple(row))
    return MatrixFamily(tuple(rows), w + (1,), F.letter)


def _det(rows: Sequence[Sequence[Poly]], nvars: int) -> Poly:
    t = len(rows)
    memo: dict[tuple[int, ...], Poly] = {}

    # expand along rows top-down; key is the set of still-available columns
    def rec(r: int, cols: tuple[int, ...]) -> Poly:
        if r == t:
            return Poly.const(nvars, 1)
        if cols in memo:
            return memo[cols]
        total = Poly.zero(nvars)
        for pos, c in enumerate(cols):
            entry = rows[r][c]
            if entry.is_zero():
                continue
            sub = rec(r + 1, cols[:pos] + cols[pos + 1:])
            term = entry * sub
            total = total - term if pos % 2 else total + term
        memo[cols] = total
        return total

    return rec(0, tuple(range(t)))


def minors(F: MatrixFamily, t: int) -> list[Poly]:
    """All t x t minors, ordered by row set then column set."""
    if not 1 <= t <= min(F.m, F.n):
        raise DimensionError(f"minor size {t} out of range for a {F.m}x{F.n} matrix")
    out = []
    for rs in combinations(range(F.m), t):
        for cs in combinations(range(F.n), t):
            out.append(_det([[F[i, j] for j in cs] for i in rs], F.N))
    return out


@dataclass(frozen=True)
class Generator:
    """A generator matrix of a graded module together with its level shift.

    Entry (i, j) is weighted homogeneous of degree d_ij + shift, or zero.
    Jacobian generators are the ones that need a non-constant multiplier in
    the non-extended tangent space.
    """

    matrix: tuple[tuple[Poly, ...], ...]
    shift: int
    label: str
    jacobian: bool = False

    @property
    def m(self) -> int:
        return len(self.matrix)

    @property
    def n(self) -> int:
        return len(self.matrix[0])

    def nonzero_cells(self):
        for i, row in enumerate(self.matrix):
            for j, p in enumerate(row):
                if p:
                    yield i, j, p


@dataclass(frozen=True)
class GeneratorSet:
    jacobian_gens: tuple[Generator, ...]
    row_gens: tuple[Generator, ...]
    col_gens: tuple[Generator, ...]

    def all(self) -> tuple[Generator, ...]:
        return self.jacobian_gens + self.row_gens + self.col_gens

    def __len__(self):
        return len(self.jacobian_gens) + len(self.row_gens) + len(self.col_gens)

    def __iter__(self):
        return iter(self.all())


def row_generator(F: MatrixFamily, l: int, k: int) -> tuple[tuple[Poly, ...], ...]:
    """R_lk: the l-th row equals the k-th row of F, zeros elsewhere."""
    z = Poly.zero(F.N)
    return tuple(F.entries[k] if i == l else (z,) * F.n for i in range(F.m))


def col_generator(F: MatrixFamily, p: int, q: int) -> tuple[tuple[Poly, ...], ...]:
    """C_pq: the p-th column equals the q-th column of F, zeros elsewhere."""
    z = Poly.zero(F.N)
    return tuple(tuple(F[i, q] if j == p else z for j in range(F.n)) for i in range(F.m))


def row_col_generators(F: MatrixFamily, D: DegreeMatrix) -> tuple[tuple[Generator, ...], tuple[Generator, ...]]:
    a, b = scaling_shifts(D)
    rows = tuple(
        Generator(row_generator(F, l, k), a[k] - a[l], f"R{l + 1}{k + 1}")
        for l in range(F.m) for k in range(F.m)
    )
    cols = tuple(
        Generator(col_generator(F, p, q), b[q] - b[p], f"C{p + 1}{q + 1}")
        for p in range(F.n) for q in range(F.n)
    )
    return rows, cols


def generators(F: MatrixFamily, D: DegreeMatrix | None = None) -> GeneratorSet:
    """Jacobian, row and column generators of the tangent space of F.

    N + m^2 + n^2 generators, R_ll and C_pp included.
    """
    if D is None:
        D = validate_whomog(F)
    jac = tuple(
        Generator(
            tuple(tuple(p.partial(lam) for p in row) for row in F.entries),
            -F.weights[lam],
            f"dF/d{F.letter}{lam + 1}",
            jacobian=True,
        )
        for lam in range(F.N)
    )
    rows, cols = row_col_generators(F, D)
    return GeneratorSet(jac, rows, cols)


def is_shifted_homogeneous(g: Generator, D, w: Sequence[int]) -> bool:
    d = _as_int_matrix(D)
    return all(
        all(wdeg(mono, w) == d[i][j] + g.shift for mono in p.terms)
        for i, j, p in g.nonzero_cells()
    )


@dataclass(frozen=True)
class RankStratum:
    """M_mn^t: matrices of rank strictly less than t."""

    m: int
    n: int
    t: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1 or not 1 <= self.t <= min(self.m, self.n):
            raise DimensionError(f"invalid stratum (m, n, t) = ({self.m}, {self.n}, {self.t})")


def expected_codim(s: RankStratum) -> int:
    return (s.m - s.t + 1) * (s.n - s.t + 1)
