import math

import numpy as np
import pytest
from scipy import integrate

from blform import (
    DimensionError,
    DomainError,
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
from blform.forms import lambda_n_form

from oracles import lambda1_reference

SQRT_PI = math.sqrt(math.pi)


def within(est, target, sigmas=3.0, rel=0.0):
    return abs(est.value - target) <= max(sigmas * est.stderr, rel * abs(target))


def test_lp_norm_examples():
    assert lp_norm(disk(1), "1/2") == pytest.approx(SQRT_PI, rel=1e-15)
    assert lp_norm(gaussian(1), "1/2") == pytest.approx(math.sqrt(0.5), rel=1e-15)
    assert lp_norm(cauchy_kernel(), "1/2", q=math.inf) == pytest.approx(SQRT_PI)
    assert lp_norm(gaussian(2, amplitude=3), 0) == 3
    with pytest.raises(DomainError):
        lp_norm(cauchy_kernel(), "1/2", q=2)
    with pytest.raises(DomainError):
        lp_norm(conj_cauchy_kernel(), "2/5", q=math.inf)


@pytest.mark.parametrize("theta", [0.3, 0.5, 0.7, 1.0])
def test_lp_norm_against_quadrature(theta):
    # radial integral of |f|^p on C
    p = 1 / theta
    g = gaussian(1.3, center=(0.4, -1.0), amplitude=2.0)
    val, _ = integrate.quad(lambda r: 2 * math.pi * r * (2.0 * math.exp(-math.pi * r * r / 1.69)) ** p, 0, 20)
    assert lp_norm(g, repr(theta)) == pytest.approx(val**theta, rel=1e-8)


def test_test_function_validation():
    with pytest.raises(ValueError):
        TestFunction("gaussian")
    with pytest.raises(DimensionError):
        TestFunction("cauchy", dim=1)
    with pytest.raises(ValueError):
        TestFunction("blob")
    g = gaussian(1.5, center=(1, 2), amplitude=0.5)
    assert TestFunction.from_json(g.to_json()) == g


def test_closed_form_and_quadrature_agree():
    F = FormInstance([[1, 0], [0, 1], [1, 1]], tuple(gaussian(1, dim=1) for _ in range(3)), ell=1)
    exact = 3 ** -0.5
    assert gaussian_form_closed_form(F).value == pytest.approx(exact, rel=1e-12)
    assert tensor_quadrature_form(F).value == pytest.approx(exact, rel=1e-10)


def test_general_form_gaussian_triangle():
    F = FormInstance([[1, 0], [0, 1], [1, 1]], tuple(gaussian(1, dim=1) for _ in range(3)), ell=1)
    est = eval_general_form(F, 200_000, seed=1)
    assert within(est, 3 ** -0.5)


def test_general_form_separable_matches_product():
    # standard basis: the form is the product of the one-dimensional integrals
    funcs = (gaussian(0.7, dim=1, center=(0.3,)), disk(1.2, dim=1, center=(-0.5,)))
    F = FormInstance([[1, 0], [0, 1]], funcs, ell=1)
    prod = 1.0
    for fn in funcs:
        prod *= integrate.quad(lambda x: float(fn(np.array([x]))), -10, 10, points=[-1.7, 0.7])[0]
    est = eval_general_form(F, 400_000, seed=2)
    assert within(est, prod, sigmas=4)


def test_general_form_ell2_closed_form():
    F = FormInstance([[1, 0], [0, 1], [1, -1]], tuple(gaussian(w) for w in (1, 0.8, 1.2)), ell=2)
    est = eval_general_form(F, 200_000, seed=4)
    assert within(est, gaussian_form_closed_form(F).value, sigmas=4)


def test_general_form_scaling_covariance():
    # multiplying the first function by c multiplies the estimate by c (same seed, same draws)
    F = FormInstance([[1, 0], [0, 1], [1, 1]], tuple(gaussian(1, dim=1) for _ in range(3)), ell=1)
    a = eval_general_form(F, 50_000, seed=3)
    b = eval_general_form(F.scaled([2.5, 1, 1]), 50_000, seed=3)
    assert b.value == pytest.approx(2.5 * a.value, rel=1e-12)


def test_general_form_rejects_kernels_and_degenerate():
    with pytest.raises(DomainError):
        eval_general_form(FormInstance([[1, 0], [0, 1]], (cauchy_kernel(), gaussian(1)), ell=2), 100, 0)
    with pytest.raises(DomainError):
        eval_general_form(FormInstance([[1, 0], [2, 0]], (gaussian(1, dim=1),) * 2), 100, 0)
    with pytest.raises(DimensionError):
        FormInstance([[1, 0], [0, 1]], (gaussian(1),), ell=2)


def test_seeded_determinism_and_thread_independence():
    F = FormInstance([[1, 0], [0, 1], [1, 1]], tuple(gaussian(1, dim=1) for _ in range(3)), ell=1)
    a = eval_general_form(F, 100_000, seed=5, threads=1, chunk_size=10_000)
    b = eval_general_form(F, 100_000, seed=5, threads=4, chunk_size=10_000)
    assert a == b
    c = eval_general_form(F, 100_000, seed=6, threads=1, chunk_size=10_000)
    assert c.value != a.value


def test_lambda0_disk_is_pi():
    est = eval_lambda_n(0, disk(1), [disk(1)], 200_000, seed=0)
    assert within(est, math.pi)


def test_verify_lambda0_ratios():
    rep = verify_main_estimate(0, disk(1), [disk(1)], "1/2", 200_000, seed=0)
    assert abs(rep.ratio - 1) <= 3 * rep.ratio_stderr
    rep = verify_main_estimate(0, gaussian(1), [disk(1)], "1/2", 200_000, seed=0)
    assert rep.ratio + 3 * rep.ratio_stderr < 1
    with pytest.raises(DomainError):
        verify_main_estimate(0, disk(1), [disk(1)], "3/10", 100, 0)


def test_lambda_input_checks():
    with pytest.raises(DimensionError):
        eval_lambda_n(1, gaussian(1), [gaussian(1)], 100, 0)
    with pytest.raises(DomainError):
        eval_lambda_n(0, cauchy_kernel(), [gaussian(1)], 100, 0)


def test_lambda_truncation_warning():
    est = eval_lambda_n(1, gaussian(1), [gaussian(1)] * 3, 1000, seed=0, radius=0.5)
    assert est.warnings
    assert not eval_lambda_n(1, gaussian(1), [gaussian(1)] * 3, 1000, seed=0).warnings


OFF_T = gaussian(1, center=(0.5, 0))
OFF_Q = [gaussian(1, center=(0.3, 0.2)), gaussian(1, center=(-0.4, 0.1)), gaussian(1, center=(0.2, -0.5))]


def test_lambda1_matches_independent_sampler():
    est = eval_lambda_n(1, OFF_T, OFF_Q, 1_000_000, seed=11)
    ref, ref_se = lambda1_reference(OFF_T, OFF_Q, 1_000_000, seed=12, sigma0=0.6, rho=0.8)
    assert abs(est.complex_value - ref) <= 4 * math.hypot(est.stderr, ref_se)
    assert abs(ref) > 10 * ref_se  # the comparison is not against zero


def test_lambda1_conjugate_reflection():
    # substituting x -> conj(x) swaps the two kernel types, so reflecting
    # every (real-valued) input conjugates the form
    est = eval_lambda_n(1, OFF_T, OFF_Q, 400_000, seed=13)
    refl = eval_lambda_n(1, OFF_T.reflected(), [q.reflected() for q in OFF_Q], 400_000, seed=14)
    assert abs(est.complex_value - refl.complex_value.conjugate()) <= 4 * math.hypot(est.stderr, refl.stderr)


def test_lambda_n_form_layout():
    F = lambda_n_form(1, OFF_T, OFF_Q)
    kinds = [fn.kind for fn in F.functions]
    assert kinds == ["gaussian", "cauchy", "gaussian", "conj_cauchy", "gaussian", "gaussian"]
    assert F.ell == 2 and F.k == 3


def test_basis_bound_at_every_vertex():
    from fractions import Fraction

    from blform import VectorMatroid, bl_constant, vertices

    vecs = [[1, 0], [0, 1], [1, 1]]
    funcs = (gaussian(1, dim=1), disk(0.7, dim=1, center=(0.2,)), gaussian(1.4, dim=1, center=(-0.3,)))
    F = FormInstance(vecs, funcs, ell=1)
    M = VectorMatroid(vecs)
    est = eval_general_form(F, 400_000, seed=21)
    C = float(bl_constant(M, 1))
    for v in vertices(M):
        bound = C * math.prod(lp_norm(f, th) for f, th in zip(funcs, v.theta))
        assert est.value <= bound + 3 * est.stderr
    # the example instance: basis {e1, e2}, sup norm on the third factor
    G = FormInstance(vecs, tuple(gaussian(1, dim=1) for _ in range(3)), ell=1)
    g = eval_general_form(G, 400_000, seed=22)
    assert g.value <= lp_norm(gaussian(1, dim=1), 1) ** 2 * lp_norm(gaussian(1, dim=1), Fraction(0)) + 3 * g.stderr


def test_verify_ratio_is_scale_invariant():
    q = [gaussian(1, center=(0.3, 0.2)), gaussian(1), gaussian(1.2, center=(0, 0.4))]
    a = verify_main_estimate(1, OFF_T, q, "1/2", 50_000, seed=3)
    b = verify_main_estimate(1, OFF_T.scaled(2.0), [q[0].scaled(0.5), q[1], q[2].scaled(3.0)], "1/2", 50_000, seed=3)
    assert b.ratio == pytest.approx(a.ratio, rel=1e-12)
    assert b.estimate.value == pytest.approx(3.0 * a.estimate.value, rel=1e-12)
