import random
from fractions import Fraction as F

import pytest

from halfspace6v.errors import ArityError, ContourInvalid, GuardViolated
from halfspace6v.rowops import partition_G
from halfspace6v.symfun import (
    ContourSpec,
    cauchy_check,
    default_orthogonality_contour,
    g_contour,
    g_subset,
    nested_contours,
    orthogonality_check,
    validate_contours,
    verify_g_recursion_suite,
    z_triangular_vec,
)
from halfspace6v.triangular import TriangularSpec, z_subset_kuperberg
from halfspace6v.weights import ModelParams, h_func

P = ModelParams(q=F(1, 4), a=F(3), c=F(-2), y=(F(1),))
P_INHOM = ModelParams(q=F(1, 4), a=F(3), c=F(-2), y=(F(4, 5), F(6, 5), F(1)))


def test_g_subset_empty_is_Z():
    xs = (F(1, 2), F(2, 5), F(3, 8))
    assert g_subset((), xs, P) == z_subset_kuperberg(TriangularSpec(xs, P))


def test_g_subset_single_site_closed_form():
    x = F(1, 2)
    assert g_subset((1,), (x,), P) == h_func(x, P) * (1 - P.q) * x / (1 - P.q * x)


def test_g_subset_needs_enough_variables():
    with pytest.raises(ArityError):
        g_subset((2, 1), (F(1, 2),), P)


@pytest.mark.parametrize("params", [P, P_INHOM])
def test_g_subset_matches_operator_oracle(params):
    xs = (F(1, 2), F(2, 5))
    for nu in [(), (1,), (2,), (3,), (2, 1), (4, 2), (5, 3, 1)[:2]]:
        assert g_subset(nu, xs, params) == partition_G(nu, (), xs, params), nu


def test_g_subset_three_rows_exact():
    xs = (F(1, 2), F(2, 5), F(3, 8))
    for nu in [(2, 1), (3, 2, 1), (4, 1), (6, 3)]:
        assert g_subset(nu, xs, P_INHOM) == partition_G(nu, (), xs, P_INHOM), nu


def test_c_inf_g_subset_factorises():
    pci = ModelParams(q=F(1, 4), a=F(3), c_infinite=True)
    xs = (F(1, 2), F(2, 5))
    assert g_subset((1,), xs, pci) == partition_G((1,), (), xs, pci)


def test_c_inf_contour_formula():
    # factorized integrand at c -> infinity still reproduces the subset form
    pci = ModelParams(q=F(1, 4), a=F(3), c_infinite=True)
    v = g_contour((1,), (F(1, 2),), pci, nodes=128)
    assert abs(v - float(g_subset((1,), (F(1, 2),), pci))) < 1e-8


def test_z_triangular_vec_matches_scalar():
    xs = (0.32, 0.57, 0.71, 0.44)
    ref = z_subset_kuperberg(TriangularSpec(xs, ModelParams(q=0.25, a=3.0, c=-2.0)))
    vec = z_triangular_vec(list(xs), ModelParams(q=0.25, a=3.0, c=-2.0))
    assert abs(complex(ref) - complex(vec)) < 1e-12


def test_g_contour_n0_is_Z():
    xs = (F(1, 2), F(2, 5))
    v = g_contour((), xs, P)
    assert abs(v - complex(z_subset_kuperberg(TriangularSpec(xs, P)))) < 1e-12


def test_g_contour_matches_subset_n1():
    v = g_contour((1,), (F(1, 2),), P, nodes=128)
    assert abs(v - float(g_subset((1,), (F(1, 2),), P))) < 1e-8
    xs = (F(1, 2), F(2, 5))
    v = g_contour((2,), xs, P, nodes=128)
    assert abs(v - float(g_subset((2,), xs, P))) < 1e-8


def test_g_contour_matches_subset_n2():
    p = ModelParams(q=F(1, 10), a=F(3), c=F(-2), y=(F(1),))
    xs = (F(4, 5), F(7, 10))
    v = g_contour((2, 1), xs, p, nodes=96)
    ref = float(g_subset((2, 1), xs, p))
    assert abs(v - ref) < 1e-6 * abs(ref)


def test_contour_validation_rejects_bad_circles():
    spec = ContourSpec(((0.5 + 0j, 1.0),))
    with pytest.raises(ContourInvalid):
        validate_contours(spec, [0.5], [0.6], 0.25)  # excluded point inside
    with pytest.raises(ContourInvalid):
        validate_contours(ContourSpec(((0.5, 0.1), (0.5, 0.05))), [0.45], [5.0], 0.25)


def test_nested_contours_constructor():
    spec = nested_contours([0.5], [0.125, 8.0, 4.0, 3.0, -2.0], 1, 0.25)
    validate_contours(spec, [0.5], [0.125, 8.0, 4.0, 3.0, -2.0], 0.25)


def test_recursion_suite():
    rep = verify_g_recursion_suite((1,), (F(1, 2),), P)
    assert rep["residue_at_qx1"][0] and rep["residue_at_qx1"][1] < 1e-6
    assert rep["decay_at_large_y"][0]
    rep = verify_g_recursion_suite((2, 1), (F(1, 2), F(2, 5)), P)
    assert all(ok for ok, _ in rep.values())
    assert verify_g_recursion_suite((), (F(1, 2),), P)["vacuous"][0]


def test_cauchy_check_decays():
    xs, zs = (F(9, 10),), (F(1, 3),)
    rep = cauchy_check((), (), xs, zs, P, cutoff=10)
    assert rep["decay_ok"] and rep["final_residual"] < 1e-7
    rep = cauchy_check((), (1,), xs, zs, P, cutoff=10)
    assert rep["decay_ok"] and rep["final_residual"] < 1e-7


def test_cauchy_guard_violation():
    with pytest.raises(GuardViolated):
        cauchy_check((), (), (F(5),), (F(1, 3),), P, cutoff=4)


ORTH_PARAMS = ModelParams(
    q=0.25,
    a=3.0,
    c=None,
    y=tuple(1.0 / (1.5 + 0.1 * j) for j in range(1, 6)),
    c_infinite=True,
)


def test_orthogonality_diagonal_and_off():
    assert abs(orthogonality_check((1,), (1,), ORTH_PARAMS, nodes=128) - 1) < 1e-6
    assert abs(orthogonality_check((), (1,), ORTH_PARAMS, nodes=128)) < 1e-6
    assert abs(orthogonality_check((2,), (1,), ORTH_PARAMS, nodes=128)) < 1e-6


def test_orthogonality_requires_c_infinite():
    with pytest.raises(ArityError):
        orthogonality_check((1,), (1,), P)


def test_orthogonality_contour_constraints():
    spec = default_orthogonality_contour(ORTH_PARAMS, 4)
    (center, radius), = spec.circles
    q = 0.25
    # q-image of the circle stays off the circle's own disk
    assert abs(q * center - center) > radius * (1 + q)


def test_cauchy_check_general_mu():
    # lambda runs over part-wise dominated configurations (lambda = mu included)
    xs, zs = (F(9, 10),), (F(1, 3),)
    for mu in [(1,), (2,), (2, 1)]:
        rep = cauchy_check(mu, (), xs, zs, P, cutoff=12)
        assert rep["decay_ok"] and rep["final_residual"] < 1e-8, (mu, rep["final_residual"])


def test_g_contour_inhomogeneous_y():
    # the integrand's column products depend on y up to nu_1
    v = g_contour((2,), (F(1, 2),), P_INHOM, nodes=128)
    assert abs(v - float(g_subset((2,), (F(1, 2),), P_INHOM))) < 1e-10
    p2 = ModelParams(q=F(1, 10), a=F(3), c=F(-2), y=(F(4, 5), F(6, 5), F(1)))
    v = g_contour((2, 1), (F(4, 5), F(7, 10)), p2, nodes=96)
    assert abs(v - float(g_subset((2, 1), (F(4, 5), F(7, 10)), p2))) < 1e-10
