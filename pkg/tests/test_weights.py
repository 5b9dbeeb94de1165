from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from maval.exact_poly import parse_polynomial
from maval.weights import (
    BumpWeight,
    ConstantWeight,
    PolynomialWeight,
    ShiftedWeight,
    SumWeight,
    WeightError,
    box_intersect,
    integrate_polynomial,
    integrate_weight,
    quad_box,
    weight_from_json,
    weight_to_json,
    x_registry,
)


def test_exact_polynomial_integrals():
    R = x_registry(2)
    assert integrate_polynomial(parse_polynomial("x_1*x_2^2", R), ((0, 1), (0, 3))) == Fraction(9, 2)
    assert integrate_polynomial(parse_polynomial("1", R), ((-1, 1), (-1, 1))) == 4


def test_bump_integral_vs_scipy():
    b = BumpWeight((Fraction(1, 2),), Fraction(3, 4))
    ref, _ = integrate.quad(lambda x: float(b(np.array([[x]]))[0]), -0.25, 1.25, epsabs=1e-13)
    assert abs(integrate_weight(b, b.support(), nodes=96) - ref) < 1e-10
    b2 = BumpWeight((0, 0), 1, 2.0)
    ref2 = 2.0 * integrate.quad(lambda x: np.exp(1 / (x * x - 1)), -1, 1, epsabs=1e-13)[0] ** 2
    assert abs(integrate_weight(b2, b2.support(), nodes=96) - ref2) < 1e-9


def test_quadrature_exact_for_polynomials():
    R = x_registry(2)
    p = parse_polynomial("3*x_1^4*x_2 - x_2^3 + 2", R)
    box = ((Fraction(-1), Fraction(2)), (Fraction(0), Fraction(1)))
    w = PolynomialWeight(p, box)
    assert abs(quad_box(w, box, 8) - float(integrate_polynomial(p, box))) < 1e-12


def test_box_intersection():
    assert box_intersect(((0, 1),), ((2, 3),)) == ()
    assert box_intersect(((0, 2),), None) == ((0, 2),)


def test_weight_json_round_trip():
    R = x_registry(1)
    ws = [ConstantWeight(1, Fraction(3)), BumpWeight((0,), 1),
          PolynomialWeight(parse_polynomial("x_1^2", R), ((Fraction(0), Fraction(1)),)),
          ShiftedWeight(BumpWeight((0,), 1), (Fraction(1, 2),)),
          SumWeight(((Fraction(2), BumpWeight((0,), 1)), (Fraction(-1), ConstantWeight(1))))]
    X = np.linspace(-2, 2, 17).reshape(-1, 1)
    for w in ws:
        back = weight_from_json(weight_to_json(w), 1)
        assert np.allclose(back(X), w(X), atol=0, rtol=0)


def test_bad_bump():
    with pytest.raises(WeightError):
        BumpWeight((0,), 0)
