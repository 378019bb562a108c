"""
Exact multivariate polynomials over the rationals.

A polynomial is a sparse map from exponent tuples to nonzero ``Fraction``
coefficients.  Weighted degrees, filtrations and monomial enumeration are
computed against a weight vector ``w`` of positive integers.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache, total_ordering
from math import lcm
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

from detcert.errors import DimensionError, PolySyntaxError

Monomial = tuple[int, ...]
Weights = tuple[int, ...]
Scalar = Union[int, Fraction]


@total_ordering
class _Infinity:
    """Filtration of the zero polynomial.  Larger than every integer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __hash__(self):
        return hash("detcert.INFINITY")

    def __repr__(self):
        return "INFINITY"


INFINITY = _Infinity()


def as_weights(w: Iterable[int], nvars: int | None = None) -> Weights:
    w = tuple(int(x) for x in w)
    if nvars is not None and len(w) != nvars:
        raise DimensionError(f"expected {nvars} weights, got {len(w)}")
    if not w or any(x < 1 for x in w):
        raise DimensionError(f"weights must be positive integers, got {w}")
    return w


def unit_weights(nvars: int) -> Weights:
    return (1,) * nvars


def wdeg(alpha: Sequence[int], w: Sequence[int]) -> int:
    """Weighted degree sum(w_i * alpha_i) of the monomial x^alpha."""
    if len(alpha) != len(w):
        raise DimensionError(f"monomial has {len(alpha)} exponents but {len(w)} weights")
    return sum(a * b for a, b in zip(alpha, w))


def _mono_key(alpha: Monomial):
    # graded-lex: total degree first, then lexicographic with x1 > x2 > ...
    return (sum(alpha), alpha)


@lru_cache(maxsize=None)
def monomials_of_wdeg(nvars: int, w: Weights, e: int) -> tuple[Monomial, ...]:
    """All monomials in ``nvars`` variables of weighted degree exactly ``e``.

    Ordered by increasing total degree, then lexicographically decreasing
    exponent vector, so for unit weights the order is plain lex:
    ``x1^2, x1*x2, x2^2``.
    """
    w = tuple(w)
    if len(w) != nvars:
        raise DimensionError(f"expected {nvars} weights, got {len(w)}")
    if e < 0:
        return ()
    out: list[Monomial] = []

    def rec(i: int, rest: int, prefix: list[int]):
        if i == nvars - 1:
            if rest % w[i] == 0:
                out.append(tuple(prefix + [rest // w[i]]))
            return
        for a in range(rest // w[i], -1, -1):
            rec(i + 1, rest - a * w[i], prefix + [a])

    rec(0, e, [])
    out.sort(key=lambda a: sum(a))  # stable: keeps lex-descending inside a total degree
    return tuple(out)


def _add_mono(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


class Poly:
    """Immutable sparse polynomial with rational coefficients."""

    __slots__ = ("_terms", "nvars", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | Iterable = (), nvars: int | None = None):
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[Monomial, Fraction] = {}
        for mono, c in items:
            mono = tuple(int(a) for a in mono)
            if nvars is None:
                nvars = len(mono)
            if len(mono) != nvars:
                raise DimensionError(f"monomial {mono} does not have {nvars} exponents")
            if any(a < 0 for a in mono):
                raise DimensionError(f"negative exponent in {mono}")
            c = Fraction(c)
            if c:
                c = clean.get(mono, 0) + c
                if c:
                    clean[mono] = c
                else:
                    clean.pop(mono, None)
        if nvars is None:
            raise DimensionError("nvars is required for the zero polynomial")
        if nvars < 1:
            raise DimensionError("polynomials need at least one variable")
        self._terms = clean
        self.nvars = nvars
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict[Monomial, Fraction], nvars: int) -> "Poly":
        # trusted constructor: terms already canonical
        p = object.__new__(cls)
        p._terms = terms
        p.nvars = nvars
        p._hash = None
        return p

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls._raw({}, nvars)

    @classmethod
    def const(cls, nvars: int, c: Scalar) -> "Poly":
        return cls({(0,) * nvars: c}, nvars)

    @classmethod
    def var(cls, nvars: int, index: int) -> "Poly":
        """The variable x_{index+1} (0-based ``index``)."""
        if not 0 <= index < nvars:
            raise DimensionError(f"variable index {index} out of range for {nvars} variables")
        alpha = [0] * nvars
        alpha[index] = 1
        return cls._raw({tuple(alpha): Fraction(1)}, nvars)

    @classmethod
    def monomial(cls, alpha: Sequence[int], c: Scalar = 1) -> "Poly":
        return cls({tuple(alpha): c}, len(alpha))

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return MappingProxyType(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return not self._terms
            return self._terms == {(0,) * self.nvars: Fraction(other)}
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise DimensionError(f"nvars mismatch: {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(self.nvars, other)
        raise TypeError(f"cannot combine Poly with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for mono, c in other._terms.items():
            s = out.get(mono, 0) + c
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        return Poly._raw(out, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw({m: -c for m, c in self._terms.items()}, self.nvars)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _add_mono(m1, m2)
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return Poly._raw(out, self.nvars)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = Poly.const(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def scale(self, c: Scalar) -> "Poly":
        c = Fraction(c)
        if not c:
            return Poly.zero(self.nvars)
        return Poly._raw({m: v * c for m, v in self._terms.items()}, self.nvars)

    def shift(self, beta: Sequence[int], c: Scalar = 1) -> "Poly":
        """Multiply by the term c * x^beta."""
        beta = tuple(beta)
        if len(beta) != self.nvars:
            raise DimensionError("monomial length mismatch")
        c = Fraction(c)
        if not c:
            return Poly.zero(self.nvars)
        return Poly._raw({_add_mono(m, beta): v * c for m, v in self._terms.items()}, self.nvars)

    def partial(self, index: int) -> "Poly":
        """Formal partial derivative with respect to x_{index+1} (0-based)."""
        if not 0 <= index < self.nvars:
            raise DimensionError(f"variable index {index} out of range for {self.nvars} variables")
        out = {}
        for m, c in self._terms.items():
            a = m[index]
            if a:
                mm = list(m)
                mm[index] = a - 1
                out[tuple(mm)] = c * a
        return Poly._raw(out, self.nvars)

    def substitute_powers(self, d: int) -> "Poly":
        """Replace every variable u_k by x_k^d."""
        if d < 1:
            raise ValueError(f"power must be positive, got {d}")
        return Poly._raw({tuple(a * d for a in m): c for m, c in self._terms.items()}, self.nvars)

    def extend(self, extra: int) -> "Poly":
        """Embed into a ring with ``extra`` further variables appended."""
        pad = (0,) * extra
        return Poly._raw({m + pad: c for m, c in self._terms.items()}, self.nvars + extra)

    def truncate(self, r: int) -> "Poly":
        """Terms of total degree at most r (the r-jet at the origin)."""
        return Poly._raw({m: c for m, c in self._terms.items() if sum(m) <= r}, self.nvars)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self._terms), default=-1)

    def wdegs(self, w: Sequence[int]) -> set[int]:
        return {wdeg(m, w) for m in self._terms}

    def evaluate(self, point: Sequence[Scalar]) -> Fraction:
        total = Fraction(0)
        for m, c in self._terms.items():
            v = c
            for x, a in zip(point, m):
                if a:
                    v *= Fraction(x) ** a
            total += v
        return total

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self._terms.items(), key=lambda t: _mono_key(t[0]), reverse=True)

    def to_str(self, names: Sequence[str] | None = None) -> str:
        return format_poly(self, names)

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)!r}, nvars={self.nvars})"


def fil(f: Poly, w: Sequence[int]):
    """Filtration: least weighted degree of a monomial of f; INFINITY for f = 0."""
    if f.is_zero():
        return INFINITY
    return min(wdeg(m, w) for m in f.terms)


def is_whomog(f: Poly, w: Sequence[int], d: int) -> bool:
    """True iff every term of f has weighted degree exactly d (vacuous for f = 0)."""
    return all(wdeg(m, w) == d for m in f.terms)


def add(f: Poly, g: Poly) -> Poly:
    return f + g


def mul(f: Poly, g: Poly) -> Poly:
    return f * g


def scale(f: Poly, c: Scalar) -> Poly:
    return f.scale(c)


def partial(f: Poly, index: int) -> Poly:
    return f.partial(index)


def substitute_powers(f: Poly, d: int) -> Poly:
    return f.substitute_powers(d)


def integer_row(coeffs: Iterable[Fraction]) -> tuple[int, list[int]]:
    """Common denominator L and the integer numerators of L * coeffs."""
    coeffs = list(coeffs)
    den = lcm(*(c.denominator for c in coeffs)) if coeffs else 1
    return den, [int(c * den) for c in coeffs]


# ---------------------------------------------------------------------------
# printing and parsing

def default_names(nvars: int, letter: str = "x") -> list[str]:
    return [f"{letter}{k}" for k in range(1, nvars + 1)]


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(f: Poly, names: Sequence[str] | None = None) -> str:
    if names is None:
        names = default_names(f.nvars)
    if len(names) != f.nvars:
        raise DimensionError(f"{len(names)} names for {f.nvars} variables")
    if f.is_zero():
        return "0"
    parts = []
    for mono, c in f.sorted_terms():
        factors = [n if a == 1 else f"{n}^{a}" for n, a in zip(names, mono) if a]
        mag = abs(c)
        if not factors:
            body = _format_coeff(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = _format_coeff(mag) + "*" + "*".join(factors)
        sign = "-" if c < 0 else "+"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(f" {sign} {body}")
    return "".join(parts)


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise PolySyntaxError("unexpected character", text, start)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def parse(text: str, names: Sequence[str]) -> Poly:
    """Parse a polynomial expression over the declared variable names.

    >>> str(parse("3/2*x1*x2 - x2^2", ["x1", "x2"]))
    '3/2*x1*x2 - x2^2'
    """
    index = {n: k for k, n in enumerate(names)}
    nvars = len(names)
    if nvars < 1:
        raise DimensionError("at least one variable name is required")
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos]

    def take(kind=None, value=None):
        nonlocal pos
        tok = tokens[pos]
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of input"
            raise PolySyntaxError(f"expected {want}, got {got!r}", text, tok[2])
        pos += 1
        return tok

    def factor(alpha: list[int]):
        tok = take("name")
        if tok[1] not in index:
            raise PolySyntaxError(f"unknown variable {tok[1]!r}", text, tok[2])
        e = 1
        if peek()[1] == "^":
            take()
            e = int(take("num")[1])
        alpha[index[tok[1]]] += e

    def term() -> tuple[Monomial, Fraction]:
        coeff = Fraction(1)
        alpha = [0] * nvars
        tok = peek()
        if tok[0] == "num":
            num = int(take()[1])
            den = 1
            if peek()[1] == "/":
                take()
                den = int(take("num")[1])
                if den == 0:
                    raise PolySyntaxError("zero denominator", text, tokens[pos - 1][2])
            coeff = Fraction(num, den)
            if peek()[1] == "*":
                take()
                factor(alpha)
            elif peek()[0] == "name":
                factor(alpha)
            else:
                return tuple(alpha), coeff
        elif tok[0] == "name":
            factor(alpha)
        else:
            got = tok[1] or "end of input"
            raise PolySyntaxError(f"expected a term, got {got!r}", text, tok[2])
        while peek()[1] == "*":
            take()
            factor(alpha)
        return tuple(alpha), coeff

    terms: list[tuple[Monomial, Fraction]] = []
    sign = 1
    if peek()[1] in "+-" and peek()[0] == "op":
        sign = -1 if take()[1] == "-" else 1
    while True:
        mono, c = term()
        terms.append((mono, sign * c))
        tok = peek()
        if tok[0] == "end":
            break
        if tok[0] == "op" and tok[1] in "+-":
            sign = -1 if take()[1] == "-" else 1
            continue
        raise PolySyntaxError(f"unexpected {tok[1]!r}", text, tok[2])
    return Poly(terms, nvars)
