from fractions import Fraction

import pytest
import sympy

from maval.exact_poly import Polynomial, PolynomialError, parse_polynomial
from maval.linalg import coefficient_matrix, rank, span_coordinates
from maval.minor_spaces import (
    MatrixVariableLayout,
    gram_determinant,
    hessian_minor_space,
    k_minors,
    n_nk,
    squared_minor_basis,
)
from oracles import sympy_hessian_dim, sympy_n_nk

PAIRS = [(2, 1), (2, 2), (3, 1), (3, 2), (3, 3)]


def test_k_minors_small():
    R = MatrixVariableLayout(2, 1).registry
    assert k_minors(2, 1) == [Polynomial.var(R, "w_1_1"), Polynomial.var(R, "w_2_1")]
    (d,) = k_minors(2, 2)
    assert d == parse_polynomial("w_1_1*w_2_2 - w_2_1*w_1_2", MatrixVariableLayout(2, 2).registry)
    assert k_minors(3, 0)[0] == Polynomial.one(MatrixVariableLayout(3, 0).registry)
    with pytest.raises(PolynomialError):
        k_minors(2, 3)


def test_minors_alternating():
    lay = MatrixVariableLayout(3, 2)
    R = lay.registry
    mins = k_minors(3, 2)
    assert len(mins) == 3
    same = {f"w_{i}_2": Polynomial.var(R, f"w_{i}_1") for i in range(1, 4)}
    swap = {**{f"w_{i}_2": Polynomial.var(R, f"w_{i}_1") for i in range(1, 4)},
            **{f"w_{i}_1": Polynomial.var(R, f"w_{i}_2") for i in range(1, 4)}}
    for m in mins:
        assert m.substitute_linear(same).is_zero()
        assert m.substitute_linear(swap) == -m


@pytest.mark.parametrize("n,k,dim", [(2, 1, 3), (2, 2, 1), (3, 1, 6)])
def test_squared_minor_dimensions(n, k, dim):
    assert squared_minor_basis(n, k).dimension == dim


@pytest.mark.parametrize("n,k", PAIRS)
def test_n_nk_matches_sympy_brute_force(n, k):
    assert n_nk(n, k) == sympy_n_nk(n, k)


@pytest.mark.parametrize("n,k", PAIRS)
def test_basis_is_independent_and_inside_products(n, k):
    B = squared_minor_basis(n, k)
    assert rank(coefficient_matrix(list(B.generators))[0]) == B.dimension
    mins = k_minors(n, k)
    prods = [a * b for i, a in enumerate(mins) for b in mins[i:]]
    for g in B.generators:
        assert g.is_homogeneous() and g.degree() == 2 * k
        assert span_coordinates(g, prods) is not None


@pytest.mark.parametrize("n", [1, 2, 3])
def test_hessian_space(n):
    H = hessian_minor_space(n)
    assert H.dimension == sympy_hessian_dim(n)
    zero = [Fraction(0)] * len(H.registry)
    for g in H.generators:
        # only the empty minor survives at the zero matrix
        assert g.evaluate(zero) == (1 if g.degree() == 0 else 0)


def test_hessian_space_n2():
    H = hessian_minor_space(2)
    assert H.dimension == 5
    assert H.contains(parse_polynomial("s_1_1*s_2_2 - s_1_2^2", H.registry))
    assert not H.contains(parse_polynomial("s_1_1^2", H.registry))


def test_gram():
    R1 = MatrixVariableLayout(1, 1).registry
    assert gram_determinant(1, 1) == Polynomial.var(R1, "w_1_1", 2)
    (d,) = k_minors(2, 2)
    assert gram_determinant(2, 2) == d * d
    R = MatrixVariableLayout(3, 2).registry
    pt = {"w_1_1": Fraction(3, 5), "w_2_1": Fraction(4, 5), "w_3_1": 0, "w_1_2": Fraction(-4, 5), "w_2_2": Fraction(3, 5), "w_3_2": 0}
    assert gram_determinant(3, 2).evaluate([pt[nm] for nm in R.names]) == 1


def test_gram_signed_permutation_invariance():
    lay = MatrixVariableLayout(3, 2)
    R = lay.registry
    G = gram_determinant(3, 2)
    # w_1 -> -w_2, w_2 -> w_1
    m = {}
    for i in range(1, 4):
        m[f"w_{i}_1"] = -Polynomial.var(R, f"w_{i}_2")
        m[f"w_{i}_2"] = Polynomial.var(R, f"w_{i}_1")
    assert G.substitute_linear(m) == G
