import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maval.convex_functions import AffineMap, Combo, MaxAffine, Quadratic, SupportFn, abs_sum, zero_function
from maval.convex_geometry import convex_hull
from maval.density_experiments import (
    DensityError,
    RiemannSumWeight,
    gl_transport,
    matmul,
    mixed_discriminant_P,
    square_schedule,
    random_gl,
    spanning_rank,
    translation_average,
)
from maval.exact_poly import Polynomial, parse_polynomial
from maval.linalg import det
from maval.ma_operators import LocalFunctional, det_part, invariant_registry
from maval.minor_spaces import n_nk
from maval.valuation_lab import invariant_basis, q_polynomial
from maval.weights import BumpWeight, ConstantWeight, PolynomialWeight, x_registry

F = Fraction


def inv(n, text):
    return parse_polynomial(text, invariant_registry(n))


def test_transport_diag_example():
    Q = q_polynomial(inv(2, "s_1_1"), 1, 2)
    T = gl_transport(Q.poly, [[2, 0], [0, 1]])
    # |det g|^{-1} (2 w11)^2 = 2 w11^2
    assert T == parse_polynomial("2*w_1_1^2", Q.poly.registry)


def test_transport_identity_and_singular():
    P = inv(2, "s_1_1*s_2_2 - s_1_2^2 + y_1*y_2*s_1_2")
    assert gl_transport(P, [[1, 0], [0, 1]]) == P
    with pytest.raises(DensityError):
        gl_transport(P, [[1, 2], [2, 4]])
    with pytest.raises(DensityError):
        gl_transport(P, [[1, 2, 0], [2, 4, 1]])


def test_det_part_is_invariant_up_to_sign():
    # det(g^T s g) / |det g| = sign(det g) det g ... = |det g| det s
    rng = random.Random(2)
    for _ in range(5):
        g = random_gl(rng, 2)
        T = gl_transport(det_part(2), g)
        assert T == det_part(2).scale(abs(det([[F(v) for v in r] for r in g])))


@settings(max_examples=15)
@given(st.integers(0, 10**6))
def test_composition_law(seed):
    rng = random.Random(seed)
    g, h = random_gl(rng, 2), random_gl(rng, 2)
    for P in (inv(2, "s_1_1*y_2^2 + c*s_1_2"), q_polynomial(inv(2, "s_1_1 + 3*s_2_2"), 1, 2).poly):
        assert gl_transport(gl_transport(P, h), g) == gl_transport(P, matmul(g, h))


def test_transport_preserves_invariant_space():
    basis = invariant_basis(2, 1)
    rng = random.Random(5)
    g = random_gl(rng, 2)
    from maval.valuation_lab import basis_coordinates

    for P in basis:
        coords = basis_coordinates(gl_transport(P, g), basis)
        assert coords is not None


def test_constant_weight_average_exact():
    psi = LocalFunctional(1, ((ConstantWeight(1, F(1, 7)), inv(1, "s_1_1")),))
    rep = translation_average(psi, 3, F(1, 4))
    w = rep.functional.terms[0][0]
    assert w.value == F(1, 7) * 7 * F(1, 4)
    assert rep.sup_distance == [0.0]


def test_riemann_sum_pointwise():
    base = BumpWeight((0,), 1)
    R = RiemannSumWeight(base, F(1, 3), 2)
    x = np.array([[0.2], [-0.9], [5.0]])
    brute = [sum(base(np.array([[xi - k / 3]]))[0] for k in range(-2, 3)) / 3 for xi in x[:, 0]]
    assert np.allclose(R(x), brute, atol=1e-15)
    assert R.count() == 5
    assert R.support() == ((F(-5, 3), F(5, 3)),)


def _box_weight():
    one = Polynomial.constant(x_registry(1), 1)
    return PolynomialWeight(one, ((F(-1, 3), F(1, 3)),))


def _errors(weight, ms):
    psi = LocalFunctional(1, ((weight, inv(1, "s_1_1")),))
    out = []
    for m in ms:
        K, eps = square_schedule(m)
        out.append(translation_average(psi, K, eps, window=[(-1, 1)], samples=801).sup_distance[0])
    return out


def test_discontinuous_weight_error_halves():
    errs = _errors(_box_weight(), [4, 8, 16])
    for a, b in zip(errs, errs[1:]):
        assert abs(b / a - 0.5) <= 0.1


def test_smooth_weight_converges_faster():
    bump = _errors(BumpWeight((0,), F(1, 2)), [4, 8, 16])
    assert bump[-1] < 0.5 * _errors(_box_weight(), [16])[0]
    assert bump[2] < bump[1] < bump[0]


def test_zero_mass_weight_average_tends_to_zero():
    x = Polynomial.var(x_registry(1), "x_1")
    w = PolynomialWeight(x, ((F(-1), F(1)),))
    rep = translation_average(LocalFunctional(1, ((w, inv(1, "s_1_1")),)), *square_schedule(16), window=[(-1, 1)])
    assert abs(rep.limits[0]) < 1e-14
    assert rep.sup_distance[0] < 0.1


def test_non_compact_weight_rejected():
    from maval.weights import CallableWeight

    w = CallableWeight(1, lambda X: np.ones(X.shape[:-1]))
    with pytest.raises(DensityError):
        translation_average(LocalFunctional(1, ((w, inv(1, "s_1_1")),)), 2, F(1, 2))


def test_mixed_discriminant_normalisation():
    A = [[F(2), F(1)], [F(1), F(3)]]
    P = mixed_discriminant_P([A], 2, 1)
    # D(s, A) = (s11 a22 + s22 a11 - 2 s12 a12) / 2
    assert P == inv(2, "3/2*s_1_1 + s_2_2 - s_1_2")
    assert mixed_discriminant_P([A, A], 2, 0).constant_term() == 5


HALF_SQ = {1: Quadratic([[F(1, 2)]], None), 2: Quadratic([[F(1, 2), 0], [0, F(1, 2)]], None)}


def test_spanning_quadratic_21():
    rep = spanning_rank([HALF_SQ[2]], 2, 1)
    assert rep.rank == 3 == rep.N and rep.dichotomy


def test_spanning_zero_family():
    rep = spanning_rank([zero_function(2)], 2, 1)
    assert rep.rank == 0 and rep.dichotomy
    assert rep.to_json()["q_polys"] == []


def test_spanning_top_degree():
    rep = spanning_rank([HALF_SQ[2]], 2, 2)
    assert rep.rank == 1 == rep.N


def test_spanning_monotone_in_family():
    tri = SupportFn(convex_hull([(0, 0), (1, 0), (0, 1)]))
    a = spanning_rank([tri], 2, 1, g_samples=1).rank
    b = spanning_rank([tri, HALF_SQ[2]], 2, 1, g_samples=1).rank
    assert a <= b <= n_nk(2, 1)


SIMPLEX = {1: convex_hull([(0,), (1,)]), 2: convex_hull([(0, 0), (1, 0), (0, 1)])}


@pytest.mark.parametrize("n,k", [(1, 0), (1, 1), (2, 0), (2, 1), (2, 2)])
def test_dichotomy_five_pairs(n, k):
    fam = [SupportFn(SIMPLEX[n])]
    rep = spanning_rank(fam, n, k)
    assert rep.dichotomy and rep.rank == n_nk(n, k)
    assert spanning_rank(fam, n, k, seed=9).rank == rep.rank


def test_spanning_rejects_wrong_dimension():
    with pytest.raises(DensityError):
        spanning_rank([abs_sum(1)], 2, 1)


def test_default_sample_count_reaches_full_rank_for_one_part():
    q = Quadratic([[F(1, 2), 0, 0], [0, F(1, 2), 0], [0, 0, F(1, 2)]], None)
    # with only three transports a single orbit cannot span the six-dimensional space
    assert spanning_rank([q], 3, 1, g_samples=2).rank == 3
    rep = spanning_rank([q], 3, 1)
    assert rep.g_samples == n_nk(3, 1) and rep.rank == rep.N == 6
