"""Exact certification of finite G-determinacy and EIDS for polynomial matrix families."""

from detcert.certify import (
    Cm2Certificate,
    DeterminacyCertificate,
    Eq1Certificate,
    GenericSampleReport,
    certify_finite_determinacy,
    cm2_check,
    complete_jet,
    eq1_check,
    generic_family,
    generic_sample,
    lift_eq1,
    perturb_check,
    tangent_codimension,
)
from detcert.familyfile import load_fixture
from detcert.graded import Mode, build_slice, check_membership, codimension, member
from detcert.linalg import exact_rank
from detcert.matrix_family import (
    DegreeMatrix,
    MatrixFamily,
    RankStratum,
    apply_scaling,
    degree_matrix,
    expected_codim,
    generators,
    minors,
    scaling_shifts,
    validate_whomog,
)
from detcert.poly import INFINITY, Poly, fil, is_whomog, monomials_of_wdeg, parse, wdeg

__version__ = "0.1.0"
