"""Exact matroid-polytope checks and Monte Carlo estimates for
Brascamp-Lieb type multilinear forms."""

from .errors import (
    BLFormError,
    DegenerateError,
    DimensionError,
    DomainError,
    PropertyViolation,
    RankDeficientError,
)
from .exact_linalg import (
    ExactMatrix,
    IntegerEchelon,
    Rational,
    determinant,
    format_rational,
    rank,
    rref,
    to_rational,
)
from .family import (
    FamilyInstance,
    IntervalSet,
    PDeltaPoint,
    build_family,
    decompose_spanned,
    e_intervals,
    family_report,
    find_dependent_triple,
    induction_neighborhood,
    sample_p_delta,
    verify_all_base_dets,
    verify_full_set,
    verify_interval_bound,
    verify_p_delta_inclusion,
)
from .forms import (
    EstimateResult,
    FormInstance,
    TestFunction,
    cauchy_kernel,
    conj_cauchy_kernel,
    disk,
    eval_general_form,
    eval_lambda_n,
    gaussian,
    gaussian_form_closed_form,
    lp_norm,
    tensor_quadrature_form,
    verify_main_estimate,
)
from .matroid import VectorMatroid, indices_of, mask_of
from .polytope import (
    ExponentTuple,
    MembershipVerdict,
    basis_substitution,
    bl_constant,
    margin,
    membership,
    vertices,
)

__version__ = "0.1.0"
