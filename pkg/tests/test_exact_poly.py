import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from maval.exact_poly import (
    Gaussian,
    Polynomial,
    PolynomialError,
    RegistryMismatchError,
    UnknownVariableError,
    VariableRegistry,
    format_polynomial,
    parse_polynomial,
)
from maval.minor_spaces import MatrixVariableLayout, module_layout

REG = VariableRegistry(["w_1_1", "w_2_1", "z_1", "z_2"])
NAMES = REG.names


@st.composite
def polys(draw, max_terms=5, max_deg=3, gaussian=False):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        mono = tuple(draw(st.integers(0, max_deg)) for _ in NAMES)
        re = draw(st.fractions(min_value=-9, max_value=9, max_denominator=5))
        c = Gaussian.make(re, draw(st.fractions(min_value=-3, max_value=3, max_denominator=3))) if gaussian else re
        terms[mono] = terms.get(mono, 0) + c
    return Polynomial(REG, terms)


def to_sympy(p):
    syms = sympy.symbols(NAMES)
    out = 0
    for m, c in p.terms.items():
        cc = sympy.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else (
            sympy.Rational(c.re.numerator, c.re.denominator) + sympy.I * sympy.Rational(c.im.numerator, c.im.denominator))
        out += cc * sympy.Mul(*[s**e for s, e in zip(syms, m)])
    return sympy.expand(out)


def v(name):
    return Polynomial.var(REG, name)


def test_monomial_product_and_difference_of_squares():
    w11, w21 = v("w_1_1"), v("w_2_1")
    assert w11 * w11 == Polynomial.var(REG, "w_1_1", 2)
    assert (w11 + w21) * (w11 - w21) == w11**2 - w21**2


@given(polys(), polys())
def test_multiply_matches_sympy(p, q):
    assert to_sympy(p * q) == sympy.expand(to_sympy(p) * to_sympy(q))
    if p and q:
        assert (p * q).degree() == p.degree() + q.degree()


@given(polys(gaussian=True), polys(gaussian=True), polys(gaussian=True))
def test_ring_axioms(p, q, r):
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p * q == q * p


def test_registry_mismatch_is_structured():
    other = VariableRegistry(["x_1"])
    with pytest.raises(RegistryMismatchError):
        v("w_1_1") * Polynomial.var(other, "x_1")


def test_differentiate():
    assert v("w_1_1").__pow__(2).differentiate("w_1_1") == v("w_1_1").scale(2)
    assert (v("w_1_1") * v("z_2")).differentiate("z_1").is_zero()
    with pytest.raises(UnknownVariableError):
        v("w_1_1").differentiate("nope")


@given(polys(), polys(), st.sampled_from(NAMES))
def test_leibniz(p, q, name):
    assert (p * q).differentiate(name) == p.differentiate(name) * q + p * q.differentiate(name)


@given(polys(max_deg=4))
def test_derivative_matches_finite_difference(p):
    dp = p.differentiate("z_1")
    rng = random.Random(0)
    for _ in range(5):
        pt = [Fraction(rng.randint(-4, 4), rng.randint(1, 4)) for _ in NAMES]
        h = 1e-6
        up = [float(x) for x in pt]
        dn = list(up)
        up[2] += h
        dn[2] -= h
        fd = (p.evaluate(up) - p.evaluate(dn)) / (2 * h)
        exact = float(dp.evaluate(pt))
        assert abs(fd - exact) <= 1e-5 * max(1.0, abs(exact))


def test_substitute_linear_basic():
    p = v("w_1_1")
    assert p.substitute_linear({"w_1_1": v("w_1_1") + v("w_2_1")}) == v("w_1_1") + v("w_2_1")
    q = v("w_1_1") * v("z_1") + v("w_2_1")
    assert q.substitute_linear({}) == q
    with pytest.raises(PolynomialError):
        q.substitute_linear({"w_1_1": v("w_1_1") ** 2})


def _random_linear_map(rng):
    return {nm: sum((v(t).scale(rng.randint(-2, 2)) for t in NAMES), Polynomial.zero(REG)) for nm in NAMES}


def test_substitution_commutes_with_evaluation():
    rng = random.Random(1)
    p = parse_polynomial("w_1_1^2*z_1 - 3/7*w_2_1*z_2 + 2*z_1^3 + 1", REG)
    for _ in range(100):
        M = _random_linear_map(rng)
        pt = [Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in NAMES]
        mapped = [M[nm].evaluate(pt) for nm in NAMES]
        assert p.substitute_linear(M).evaluate(pt) == p.evaluate(mapped)


def test_substitution_composition():
    rng = random.Random(2)
    p = parse_polynomial("w_1_1*w_2_1*z_2 + z_1^2 - w_2_1", REG)
    for _ in range(10):
        G, H = _random_linear_map(rng), _random_linear_map(rng)
        composed = {nm: H[nm].substitute_linear(G) for nm in NAMES}
        assert p.substitute_linear(H).substitute_linear(G) == p.substitute_linear(composed)


def test_leading_term_lex():
    lay = module_layout(2, 1)
    R = lay.registry
    p = parse_polynomial("w_1_1^2 + w_2_1^2", R)
    assert p.leading_term() == (Polynomial.var(R, "w_1_1", 2).leading_term()[0], 1)
    q = parse_polynomial("w_2_1*z_1 + w_2_1*z_2", R)
    assert q.leading_term()[0] == parse_polynomial("w_2_1*z_1", R).leading_term()[0]
    with pytest.raises(PolynomialError):
        Polynomial.zero(R).leading_term()


@given(polys())
def test_leading_term_agrees_with_full_sort(p):
    if p:
        ms = sorted(p.terms, reverse=True)
        assert p.leading_term() == (ms[0], p.terms[ms[0]])


def test_layout_order():
    assert list(MatrixVariableLayout(2, 2).registry.names) == ["w_1_1", "w_2_1", "w_1_2", "w_2_2"]


def test_evaluate():
    assert v("w_1_1").__pow__(2).evaluate([3, 0, 0, 0]) == 9
    assert Polynomial.one(REG).evaluate([7, 1, 2, 3]) == 1
    with pytest.raises(PolynomialError):
        v("w_1_1").evaluate([1])


@given(polys(max_deg=3))
def test_exact_vs_float_evaluation(p):
    rng = random.Random(3)
    pt = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in NAMES]
    ex = float(p.evaluate(pt))
    fl = p.evaluate([float(x) for x in pt])
    assert abs(ex - fl) <= 1e-12 * max(1.0, abs(ex)) + 1e-12 * sum(abs(float(c)) for c in p.terms.values())


@given(polys(gaussian=True))
def test_text_round_trip(p):
    s = format_polynomial(p)
    back = parse_polynomial(s, REG)
    assert back == p
    assert format_polynomial(back) == s


def test_text_example():
    R = module_layout(2, 1).registry
    s = "2*w_1_1^2*z_1 - 3/7*w_2_1 + (0,1)*z_2"
    p = parse_polynomial(s, R)
    assert parse_polynomial(format_polynomial(p), R) == p
    assert p.coefficient(parse_polynomial("z_2", R).leading_term()[0]) == Gaussian.make(0, 1)


def test_lex_order_total():
    rng = random.Random(4)
    for _ in range(200):
        a, b, c = (tuple(rng.randint(0, 2) for _ in range(4)) for _ in range(3))
        assert (a < b) + (b < a) + (a == b) == 1
        if a < b and b < c:
            assert a < c
