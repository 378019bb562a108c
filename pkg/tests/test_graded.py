import itertools
import random

import pytest
import sympy as sp

from detcert.errors import DegenerateEntry, LevelError
from detcert.familyfile import load_fixture
from detcert.graded import (
    Mode,
    Target,
    build_slice,
    check_membership,
    codimension,
    expand_witness,
    level_of,
    member,
)
from detcert.matrix_family import MatrixFamily, generators, validate_whomog
from detcert.poly import Poly, monomials_of_wdeg

import oracles


def fam(rows, N, w=None):
    return MatrixFamily.from_rows(rows, N, w)


def setup(F):
    D = validate_whomog(F)
    return generators(F, D), D, F.weights


def to_sympy(F):
    xs = oracles.symbols(F.N)
    env = {f"x{k + 1}": x for k, x in enumerate(xs)}
    M = sp.Matrix([[sp.sympify(s.replace("^", "**"), locals=env) for s in row] for row in F.to_strings()])
    return M, xs


# -- the 1x1 family (x^2) worked by hand ------------------------------------
#
# J = (2x), R11 = C11 = (x^2).  Levels: e = -2 holds 1, e = -1 holds x, e >= 0
# holds x^(e+2).  Strict: x*2x covers level 0, nothing reaches 1 or x, so the
# quotient is <1, x> (dim 2) and k = 2.  Extended: 2x itself is allowed, the
# quotient is <1> (dim 1) and k = 1.

def test_square_levels_by_hand():
    F = load_fixture("square")
    gens, D, w = setup(F)
    strict = [(e, *_rank(gens, D, w, e, Mode.STRICT)) for e in (-2, -1, 0, 1)]
    assert strict == [(-2, 1, 0), (-1, 1, 0), (0, 1, 1), (1, 1, 1)]
    extended = [(e, *_rank(gens, D, w, e, Mode.EXTENDED)) for e in (-2, -1, 0)]
    assert extended == [(-2, 1, 0), (-1, 1, 1), (0, 1, 1)]


def _rank(gens, D, w, e, mode):
    sl = build_slice(gens, D, w, e, mode)
    return sl.ambient_dim, sl.echelon().rank


def test_square_membership_and_codimension():
    gens, D, w = setup(load_fixture("square"))
    strict = check_membership(gens, D, w, Mode.STRICT)
    assert strict.verified and strict.k == 2
    ext = check_membership(gens, D, w, Mode.EXTENDED)
    assert ext.verified and ext.k == 1
    assert codimension(gens, D, w, Mode.STRICT).total == 2
    assert codimension(gens, D, w, Mode.EXTENDED).total == 1


def test_unit_entries_rejected():
    F = fam([["1", "x1"]], 1)
    gens, D, w = setup(F)
    with pytest.raises(DegenerateEntry):
        check_membership(gens, D, w)


def test_not_verified_has_recheckable_obstruction():
    F = load_fixture("coords_d2")
    gens, D, w = setup(F)
    cert = check_membership(gens, D, w, Mode.STRICT, level_bound=10)
    assert not cert.verified and cert.bound == 10
    t = cert.obstruction
    assert t is not None and t.level <= 10
    ok, _ = member(t.as_matrix(F.m, F.n), gens, D, w, Mode.STRICT)
    assert not ok
    # the pure power x2^(2j) E11 is never reached
    assert t.cell == (0, 0) and t.monomial == (0, 12, 0, 0)


def test_level_of():
    F = load_fixture("sumdiff_d2")
    _, D, w = setup(F)
    assert level_of(Target((1, 1, 0, 0), (0, 1), 0).as_matrix(2, 2), D, w) == 0
    z = Poly.zero(4)
    mixed = ((Poly.monomial((2, 0, 0, 0)), Poly.monomial((3, 0, 0, 0))), (z, z))
    with pytest.raises(LevelError):
        level_of(mixed, D, w)


def test_member_rejects_non_member_and_returns_witness():
    F = load_fixture("sumdiff_d2")
    gens, D, w = setup(F)
    tgt = Target((0, 0, 0, 0), (0, 0), -2).as_matrix(2, 2)
    ok, witness = member(tgt, gens, D, w, Mode.STRICT)
    assert not ok and witness is None
    tgt = Target((7, 0, 0, 0), (1, 0), 5).as_matrix(2, 2)
    ok, witness = member(tgt, gens, D, w, Mode.STRICT)
    assert ok
    assert expand_witness(witness, gens, 2, 2, 4) == tgt


def test_zero_target_is_member():
    gens, D, w = setup(load_fixture("square"))
    ok, witness = member(((Poly.zero(1),),), gens, D, w)
    assert ok and witness == []


@pytest.mark.parametrize("name", ["square", "weighted", "sumdiff_d1", "sumdiff_d2", "circulant3_d2", "cm2_twisted"])
def test_witness_expansion_bit_for_bit(name):
    F = load_fixture(name)
    gens, D, w = setup(F)
    cert = check_membership(gens, D, w, Mode.STRICT)
    assert cert.verified
    rng = random.Random(name)
    top = cert.window_start + cert.window_width + 1
    checked = 0
    for e in range(cert.window_start, top + 1):
        sl = build_slice(gens, D, w, e, Mode.STRICT)
        for col in rng.sample(range(sl.ambient_dim), min(4, sl.ambient_dim)):
            t = sl.target(col).as_matrix(F.m, F.n)
            ok, witness = member(t, gens, D, w, Mode.STRICT)
            assert ok
            assert expand_witness(witness, gens, F.m, F.n, F.N) == t
            checked += 1
    assert checked > 0


@pytest.mark.parametrize("name", ["square", "weighted", "sumdiff_d2", "circulant3_d2", "cm2_quadrics"])
def test_stopping_rule_soundness(name):
    F = load_fixture(name)
    gens, D, w = setup(F)
    cert = check_membership(gens, D, w, Mode.STRICT)
    assert cert.verified
    start = cert.window_start + cert.window_width
    rng = random.Random(0)
    for _ in range(20):
        e = start + rng.randint(0, 3)
        cell = (rng.randrange(F.m), rng.randrange(F.n))
        monos = monomials_of_wdeg(F.N, w, e + D[cell])
        t = Target(rng.choice(monos), cell, e).as_matrix(F.m, F.n)
        ok, witness = member(t, gens, D, w, Mode.STRICT)
        assert ok and expand_witness(witness, gens, F.m, F.n, F.N) == t


@pytest.mark.parametrize("name", ["square", "sumdiff_d2", "circulant3_d2", "coords_d2", "cm2_degenerate"])
def test_coverage_is_monotone_for_unit_weights(name):
    gens, D, w = setup(load_fixture(name))
    cert = check_membership(gens, D, w, Mode.STRICT, level_bound=8)
    seen_full = False
    for r in cert.covered_levels:
        if seen_full:
            assert r.full
        seen_full |= r.full and r.ambient_dim > 0 and r.level >= 0


def test_least_k_is_tight():
    F = load_fixture("sumdiff_d2")
    gens, D, w = setup(F)
    cert = check_membership(gens, D, w, Mode.STRICT)
    k = cert.k
    # every x^alpha E_ij with |alpha| = k is a member, some with |alpha| = k - 1 is not
    for alpha in monomials_of_wdeg(4, (1, 1, 1, 1), k):
        for cell in F.cells():
            t = Target(alpha, cell, k - 2).as_matrix(2, 2)
            assert member(t, gens, D, w)[0]
    assert not all(
        member(Target(alpha, cell, k - 3).as_matrix(2, 2), gens, D, w)[0]
        for alpha in monomials_of_wdeg(4, (1, 1, 1, 1), k - 1)
        for cell in F.cells()
    )


def test_codimension_is_grading_independent_and_semicontinuous():
    # F is quasihomogeneous for w = (1, 1) and w' = (2, 1); F + G only for w'
    F = fam([["x1^2"], ["x2^3"]], 2)
    Fw = fam([["x1^2"], ["x2^3"]], 2, (2, 1))
    FG = fam([["x1^2"], ["x2^3 + x1*x2"]], 2, (2, 1))
    d = [codimension(*setup(X), Mode.EXTENDED).total for X in (F, Fw, FG)]
    assert d[0] == d[1] == 7
    assert d[2] <= d[1]
    strict = [codimension(*setup(X), Mode.STRICT).total for X in (F, Fw, FG)]
    assert strict[0] == strict[1] and strict[2] <= strict[1]


# -- engine against the dense brute-force oracle ----------------------------

def _random_family(rng, N, m, n):
    while True:
        a = [rng.randint(0, 1) for _ in range(m)]
        b = [rng.randint(1, 2 - max(a)) for _ in range(n)]
        rows = []
        for i in range(m):
            row = []
            for j in range(n):
                monos = monomials_of_wdeg(N, (1,) * N, a[i] + b[j])
                terms = {mono: rng.randint(-2, 2) for mono in rng.sample(monos, min(len(monos), rng.randint(1, 3)))}
                row.append(Poly(terms, N))
            rows.append(tuple(row))
        F = MatrixFamily(tuple(rows), (1,) * N)
        try:
            validate_whomog(F)
        except Exception:
            continue
        return F


SHAPES = [(N, m, n) for N in (1, 2, 3) for m in (1, 2) for n in (1, 2)]


@pytest.mark.parametrize("N,m,n", SHAPES)
@pytest.mark.parametrize("seed", range(3))
def test_engine_matches_oracle(N, m, n, seed):
    rng = random.Random(f"{N}{m}{n}{seed}")
    F = _random_family(rng, N, m, n)
    gens, D, w = setup(F)
    M, xs = to_sympy(F)
    ogens = oracles.tangent_generators(M, xs)
    odeg = oracles.entry_degrees(M, xs)
    assert all(odeg[i][j] == D[i, j] for i, j in F.cells() if not F[i, j].is_zero())
    for mode in (Mode.STRICT, Mode.EXTENDED):
        for e in range(-D.max(), 2):
            got = _rank(gens, D, w, e, mode)
            want = oracles.level_rank(ogens, D.as_lists(), xs, e, strict=mode is Mode.STRICT)
            assert got == want, (str(F), mode, e)
