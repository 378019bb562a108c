"""
Determinacy and EIDS certification on top of the graded engine.

Positive verdicts come from one of four routes:

* ``tangent-membership``: the tangent space contains M^k * O^{mn}, found by
  the level scan.
* ``power-substitution-lift``: a linear family L whose eq1 module contains a
  power of the maximal ideal lifts to F(x) = L(x_1^d, ..., x_N^d).
* ``quasihomogeneous-perturbation``: F certified and every term of G has
  weighted degree below the corresponding d_ij, so F + G is finitely
  determined.  Concluded, not computed: F + G is not quasihomogeneous.
* ``jet-completion``: an arbitrary r-jet G completed by a generic
  homogeneous family of degree d > r.

Negative results are always bounded ("not verified up to ..."), never a
claim of infinite determinacy.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

from detcert.errors import PreconditionError, RetryLimitExceeded, ValidationError
from detcert.graded import (
    CodimReport,
    MembershipCertificate,
    Mode,
    Target,
    build_slice,
    check_membership,
    codimension,
    expand_witness,
    member,
)
from detcert.matrix_family import (
    DegreeMatrix,
    Generator,
    MatrixFamily,
    RankStratum,
    col_generator,
    expected_codim,
    generators,
    minors,
    row_generator,
    scaling_shifts,
    validate_whomog,
)
from detcert.poly import Poly, unit_weights, wdeg

FINITELY_DETERMINED = "FinitelyDetermined"
NOT_VERIFIED = "NotVerified"

COEFF_RANGE = 9  # generic samples draw integer coefficients in [-9, 9]


def sample_level_bound(d: int) -> int:
    """Default last level for generic degree-d families.

    Degenerate draws never cover a window, and scanning them to the general
    default costs minutes for N = 4; certified generic members of degree d
    cover well below this bound.
    """
    return -d + max(12, 6 * d)


@dataclass(frozen=True)
class EidsConclusion:
    t: int
    expected_codim: int
    statement: str


def eids_conclusions(F: MatrixFamily) -> list[EidsConclusion]:
    return [
        EidsConclusion(
            t,
            expected_codim(RankStratum(F.m, F.n, t)),
            f"X^{t} = F^-1(rank < {t}) is an EIDS",
        )
        for t in range(1, min(F.m, F.n) + 1)
    ]


@dataclass
class DeterminacyCertificate:
    family: MatrixFamily
    verdict: str
    route: str
    mode: str = Mode.STRICT.value
    k: int | None = None
    membership: MembershipCertificate | None = None
    eids_conclusion: list[EidsConclusion] = field(default_factory=list)
    degrees: DegreeMatrix | None = None
    scaling: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    codimension: CodimReport | None = None
    facts: dict[str, Any] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    base: "DeterminacyCertificate | None" = None

    @property
    def finitely_determined(self) -> bool:
        return self.verdict == FINITELY_DETERMINED


def certify_finite_determinacy(
    F: MatrixFamily,
    level_bound: int | None = None,
    mode: Mode | str = Mode.STRICT,
    with_codimension: bool = False,
) -> DeterminacyCertificate:
    """Certify finite G-determinacy of a quasihomogeneous family.

    Strict mode looks for M^k * O^{mn} inside M*J(F) + O{R_lk, C_pq};
    extended mode looks for finite codimension of J(F) + O{R_lk, C_pq}.
    Either one is equivalent to finite determinacy, which in turn gives the
    EIDS property for every t.
    """
    mode = Mode(mode)
    D = validate_whomog(F)
    gens = generators(F, D)
    mem = check_membership(gens, D, F.weights, mode, level_bound)
    a, b = scaling_shifts(D)
    cert = DeterminacyCertificate(
        family=F,
        verdict=FINITELY_DETERMINED if mem.verified else NOT_VERIFIED,
        route="tangent-membership",
        mode=mode.value,
        k=mem.k,
        membership=mem,
        degrees=D,
        scaling=(a, b),
        notes=["scaling exponents are unique up to a_i + c, b_j - c"],
    )
    if mem.verified:
        cert.eids_conclusion = eids_conclusions(F)
    else:
        cert.notes.append(f"undetermined: no covering window up to level {mem.bound}")
    if with_codimension:
        cert.codimension = codimension(gens, D, F.weights, Mode.EXTENDED, level_bound)
    return cert


def tangent_codimension(F: MatrixFamily, mode: Mode | str = Mode.EXTENDED,
                        level_bound: int | None = None) -> CodimReport:
    """d_e(F) in extended mode, d(F) in strict mode."""
    D = validate_whomog(F)
    return codimension(generators(F, D), D, F.weights, mode, level_bound)


# ---------------------------------------------------------------------------
# linear families and the power-substitution lift

@dataclass
class Eq1Certificate:
    linear_family: MatrixFamily
    verdict: str  # "Holds" | "NotVerifiedUpTo"
    r: int | None
    r_max: int
    levels: list[tuple[int, int, int]]  # (r, ambient dim, rank)
    obstructions: list[tuple[int, Target]] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.verdict == "Holds"


def _check_linear(L: MatrixFamily):
    bad = [(i, j) for i, j in L.cells() if any(sum(mono) != 1 for mono in L[i, j].terms)]
    if bad:
        cells = ", ".join(f"({i + 1},{j + 1})" for i, j in bad)
        raise PreconditionError(f"entries are not homogeneous linear: {cells}")


def eq1_generators(L: MatrixFamily) -> list[Generator]:
    """u_k * dL/du_k for each k, then every R_lk and C_pq; all of level 0."""
    var = [Poly.var(L.N, k) for k in range(L.N)]
    out = [
        Generator(
            tuple(tuple(var[k] * p.partial(k) for p in row) for row in L.entries),
            0,
            f"{L.letter}{k + 1}*dL/d{L.letter}{k + 1}",
        )
        for k in range(L.N)
    ]
    out += [Generator(row_generator(L, l, k), 0, f"R{l + 1}{k + 1}")
            for l in range(L.m) for k in range(L.m)]
    out += [Generator(col_generator(L, p, q), 0, f"C{p + 1}{q + 1}")
            for p in range(L.n) for q in range(L.n)]
    return out


def eq1_degrees(L: MatrixFamily) -> tuple[tuple[int, ...], ...]:
    return tuple((1,) * L.n for _ in range(L.m))


def eq1_slice_full(L: MatrixFamily, r: int) -> tuple[int, int]:
    """(ambient dim, rank) of the degree-r slice of the eq1 module."""
    sl = build_slice(eq1_generators(L), eq1_degrees(L), unit_weights(L.N), r - 1, Mode.EXTENDED)
    ech = sl.echelon()
    return sl.ambient_dim, ech.rank


def eq1_check(L: MatrixFamily, r_max: int = 6) -> Eq1Certificate:
    """Least r with m^r * O^{mn} inside O{u_k L_k, R_lk, C_pq}, searched up to r_max."""
    _check_linear(L)
    gens = eq1_generators(L)
    D = eq1_degrees(L)
    w = unit_weights(L.N)
    levels = []
    obstructions = []
    for r in range(1, r_max + 1):
        sl = build_slice(gens, D, w, r - 1, Mode.EXTENDED)
        ech = sl.echelon()
        levels.append((r, sl.ambient_dim, ech.rank))
        if ech.is_full():
            return Eq1Certificate(L, "Holds", r, r_max, levels, obstructions)
        for col in range(sl.ambient_dim):
            if not ech.contains({col: 1}):
                obstructions.append((r, sl.target(col)))
                break
    return Eq1Certificate(L, "NotVerifiedUpTo", None, r_max, levels, obstructions)


def lift_family(L: MatrixFamily, d: int) -> MatrixFamily:
    """F(x) = L(x_1^d, ..., x_N^d)."""
    return L.map(lambda p: p.substitute_powers(d), weights=unit_weights(L.N), letter="x")


def lift_eq1(cert: Eq1Certificate, d: int, level_bound: int | None = None,
             check_pure_powers: bool = True) -> DeterminacyCertificate:
    """Lift an eq1 certificate of L to F = L(x^d).

    Besides the conclusion itself, the returned certificate records the
    chain rule x_k dF/dx_k = d * (u_k dL/du_k)(x^d), the memberships
    x_k^(d r) E_ij in the tangent space of F, and a direct engine run giving
    a concrete k.
    """
    if not cert.holds:
        raise PreconditionError(
            f"eq1 is not verified for this family (checked up to r = {cert.r_max})"
        )
    if d < 1:
        raise PreconditionError("the substitution power d must be positive")
    L = cert.linear_family
    r = cert.r
    F = lift_family(L, d)
    D = validate_whomog(F)
    gens = generators(F, D)

    chain_ok = True
    for lam, g in enumerate(gens.jacobian_gens):
        x = Poly.var(F.N, lam)
        for i, j in F.cells():
            lhs = x * g.matrix[i][j]
            rhs = (Poly.var(L.N, lam) * L[i, j].partial(lam)).substitute_powers(d).scale(d)
            chain_ok &= lhs == rhs

    pure_ok = None
    if check_pure_powers:
        pure_ok = True
        for lam in range(F.N):
            alpha = tuple(d * r if k == lam else 0 for k in range(F.N))
            for i, j in F.cells():
                tgt = Target(alpha, (i, j), 0).as_matrix(F.m, F.n)
                ok, witness = member(tgt, gens, D, F.weights, Mode.STRICT)
                if ok:
                    ok = expand_witness(witness, gens, F.m, F.n, F.N) == tgt
                pure_ok &= ok

    direct = certify_finite_determinacy(F, level_bound, Mode.STRICT)
    out = DeterminacyCertificate(
        family=F,
        verdict=FINITELY_DETERMINED,
        route="power-substitution-lift",
        k=direct.k,
        membership=direct.membership,
        eids_conclusion=eids_conclusions(F),
        degrees=D,
        scaling=direct.scaling,
        facts={
            "power": d,
            "eq1_r": r,
            "pure_power_exponent": d * r,
            "chain_rule": chain_ok,
            "pure_powers_in_tangent_space": pure_ok,
            "direct_verdict": direct.verdict,
        },
    )
    if not chain_ok or pure_ok is False:
        raise AssertionError("lift identities failed; this indicates an engine bug")
    if not direct.finitely_determined:
        out.notes.append(
            f"direct engine run found no covering window up to level {direct.membership.bound}; "
            "the lift conclusion does not depend on it"
        )
    return out


# ---------------------------------------------------------------------------
# perturbation, generic families and jet completion

def perturb_check(F: MatrixFamily, G: MatrixFamily,
                  certificate: DeterminacyCertificate | None = None,
                  level_bound: int | None = None) -> DeterminacyCertificate:
    """Conclude finite determinacy of F + G from that of F.

    Every term of g_ij must have weighted degree strictly below d_ij.
    """
    if (F.m, F.n, F.N) != (G.m, G.n, G.N):
        raise PreconditionError("F and G have different shapes")
    D = validate_whomog(F)
    if certificate is None:
        certificate = certify_finite_determinacy(F, level_bound)
    if not certificate.finitely_determined:
        raise PreconditionError("F is not certified finitely determined")
    offending = []
    for i, j in G.cells():
        for mono in G[i, j].terms:
            if wdeg(mono, F.weights) >= D[i, j]:
                offending.append((i, j, mono))
    if offending:
        listed = "; ".join(f"({i + 1},{j + 1}): x^{mono}" for i, j, mono in offending)
        raise PreconditionError(f"perturbation terms of degree >= d_ij: {listed}")
    if G.is_zero():
        return certificate
    return DeterminacyCertificate(
        family=F + G,
        verdict=FINITELY_DETERMINED,
        route="quasihomogeneous-perturbation",
        eids_conclusion=eids_conclusions(F),
        degrees=D,
        scaling=certificate.scaling,
        notes=["d_e(F) >= d_e(F + G) by upper semicontinuity (recorded, not computed)"],
        base=certificate,
    )


def generic_family(a: Sequence, d: int, letter: str = "x") -> MatrixFamily:
    """Entries sum_k a[i][j][k] * x_k^d."""
    N = len(a[0][0])
    rows = []
    for row in a:
        out = []
        for coeffs in row:
            out.append(Poly({tuple(d if t == k else 0 for t in range(N)): c
                             for k, c in enumerate(coeffs)}, N))
        rows.append(tuple(out))
    return MatrixFamily(tuple(rows), unit_weights(N), letter)


def sample_coefficients(rng: random.Random, N: int, m: int, n: int):
    return tuple(
        tuple(tuple(rng.randint(-COEFF_RANGE, COEFF_RANGE) for _ in range(N)) for _ in range(n))
        for _ in range(m)
    )


def _trial(args) -> bool:
    a, d, level_bound = args
    try:
        return certify_finite_determinacy(generic_family(a, d), level_bound).finitely_determined
    except ValidationError:
        return False


@dataclass
class GenericSampleReport:
    N: int
    m: int
    n: int
    d: int
    trials: int
    passes: int
    seed: int
    failures: list = field(default_factory=list)


def generic_sample(N: int, m: int, n: int, d: int, trials: int, seed: int,
                   level_bound: int | None = None, workers: int = 1) -> GenericSampleReport:
    """Certify ``trials`` random members of the family sum_k a_ijk x_k^d.

    Coefficient tensors are drawn up front from ``random.Random(seed)``, so
    the report does not depend on ``workers``.
    """
    if min(N, m, n, d, trials) < 1:
        raise PreconditionError("all sampling parameters must be >= 1")
    if level_bound is None:
        level_bound = sample_level_bound(d)
    rng = random.Random(seed)
    tensors = [sample_coefficients(rng, N, m, n) for _ in range(trials)]
    jobs = [(a, d, level_bound) for a in tensors]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_trial, jobs, chunksize=max(1, trials // (4 * workers))))
    else:
        results = [_trial(j) for j in jobs]
    failures = [a for a, ok in zip(tensors, results) if not ok]
    return GenericSampleReport(N, m, n, d, trials, sum(results), seed, failures)


def complete_jet(G: MatrixFamily, d: int, seed: int = 0, r: int | None = None,
                 retries: int = 10, level_bound: int | None = None):
    """Return (H, certificate) with j^r H = G and H finitely determined.

    H = G + F where F is a generic homogeneous family of degree d > r.
    """
    top = max((p.degree() for row in G.entries for p in row), default=-1)
    if r is None:
        r = max(top, 0)
    if top > r:
        raise PreconditionError(f"G has degree {top} > r = {r}")
    if d < r + 1:
        raise PreconditionError(f"completion degree d = {d} must exceed the jet order r = {r}")
    G = MatrixFamily(G.entries, unit_weights(G.N), G.letter)
    if level_bound is None:
        level_bound = sample_level_bound(d)
    rng = random.Random(seed)
    for attempt in range(1, retries + 1):
        a = sample_coefficients(rng, G.N, G.m, G.n)
        F = generic_family(a, d, G.letter)
        try:
            cert_F = certify_finite_determinacy(F, level_bound)
        except ValidationError:
            continue
        if cert_F.finitely_determined:
            break
    else:
        raise RetryLimitExceeded(f"no certified generic completion in {retries} attempts")
    H = G + F
    jet_ok = all(H[i, j].truncate(r) == G[i, j] for i, j in G.cells())
    base = perturb_check(F, G, cert_F)
    cert = DeterminacyCertificate(
        family=H,
        verdict=FINITELY_DETERMINED,
        route="jet-completion",
        eids_conclusion=eids_conclusions(H),
        degrees=cert_F.degrees,
        scaling=cert_F.scaling,
        facts={"jet_order": r, "jet_matches": jet_ok, "completion_degree": d,
               "attempts": attempt, "seed": seed},
        base=base,
    )
    if not jet_ok:
        raise AssertionError("r-jet of the completion differs from G")
    return H, cert


# ---------------------------------------------------------------------------
# Cohen-Macaulay codimension 2

@dataclass
class Cm2Certificate:
    family: MatrixFamily
    verdict: str  # "Verified" | "NotVerifiedUpTo"
    r: int | None
    membership: MembershipCertificate
    minor_count: int
    jacobian_minor_count: int

    @property
    def verified(self) -> bool:
        return self.verdict == "Verified"


def _two_by_two_minors(rows: Sequence[Sequence[Poly]]) -> list[Poly]:
    out = []
    R, C = len(rows), len(rows[0])
    for i in range(R):
        for l in range(i + 1, R):
            for j in range(C):
                for k in range(j + 1, C):
                    out.append(rows[i][j] * rows[l][k] - rows[i][k] * rows[l][j])
    return out


def cm2_ideal(F: MatrixFamily) -> tuple[list[Poly], list[Poly]]:
    """Maximal minors f_1..f_{n+1} and the 2x2 minors of their Jacobian matrix."""
    if F.m != F.n + 1:
        raise PreconditionError(f"expected an (n+1) x n matrix, got {F.m} x {F.n}")
    f = minors(F, F.n)
    jac = [[fi.partial(lam) for lam in range(F.N)] for fi in f]
    return f, _two_by_two_minors(jac) if F.N >= 2 else []


def cm2_check(F: MatrixFamily, level_bound: int | None = None) -> Cm2Certificate:
    """Does J(f) + <f_1, ..., f_{n+1}> contain a power of the maximal ideal?"""
    validate_whomog(F)
    f, jm = cm2_ideal(F)
    gens = []
    for label, polys in (("f", f), ("J", jm)):
        for k, p in enumerate(polys):
            if p.is_zero():
                continue
            degs = p.wdegs(F.weights)
            if len(degs) != 1:
                raise AssertionError("ideal generator is not weighted homogeneous")
            gens.append(Generator(((p,),), degs.pop(), f"{label}{k + 1}"))
    mem = check_membership(gens, ((0,),), F.weights, Mode.EXTENDED, level_bound, allow_units=True)
    return Cm2Certificate(F, mem.verdict, mem.k, mem, len(f), len(jm))
