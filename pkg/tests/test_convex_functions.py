import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from maval.convex_functions import (
    AffineMap,
    ConvexFunctionError,
    MaxAffine,
    Quadratic,
    SupportFn,
    abs_sum,
    add_affine,
    evaluate,
    from_json,
    ldl_psd,
    min_if_convex,
    pointwise_max,
    random_max_affine,
    scale,
    subdifferential,
    to_json,
    valuation_pair,
)
from maval.convex_geometry import box_polytope, support_eval

F = Fraction
ABS1 = MaxAffine((((1,), 0), ((-1,), 0)))

max_affines = st.builds(
    lambda seed, n, m: random_max_affine(random.Random(seed), n, m),
    st.integers(0, 10**6), st.integers(1, 3), st.integers(1, 5))


def rpoint(rng, n):
    return tuple(F(rng.randint(-20, 20), rng.randint(1, 6)) for _ in range(n))


def test_evaluate_examples():
    assert evaluate(MaxAffine((((1, 0), 0), ((-1, 0), 0))), (3, 5)) == 3
    q = Quadratic(((1, 0), (0, 1)), (0, 0), 0)
    assert evaluate(q, (F(1, 2), 3)) == F(1, 4) + 9
    sq = box_polytope((0, 0), (1, 1))
    assert evaluate(SupportFn(sq, (0, 0)), (2, 1)) == 3 == support_eval(sq, (2, 1))
    with pytest.raises(ConvexFunctionError):
        evaluate(ABS1, (1, 2))


def test_psd_check():
    assert ldl_psd([[1, 1], [1, 1]])
    assert not ldl_psd([[1, 2], [2, 1]])
    with pytest.raises(ConvexFunctionError):
        Quadratic(((0, 1), (1, 0)), (0, 0), 0)


def test_pointwise_max_examples():
    assert pointwise_max(ABS1, ABS1).canonical() == ABS1.canonical()
    g = pointwise_max(ABS1, MaxAffine((((0,), -1),)))
    assert g.canonical() == ABS1.canonical()


@given(max_affines, st.integers(0, 10**6))
def test_pointwise_max_oracle(f, seed):
    rng = random.Random(seed)
    h = random_max_affine(rng, f.n, 3)
    g = pointwise_max(f, h)
    for _ in range(30):
        x = rpoint(rng, f.n)
        assert evaluate(g, x) == max(evaluate(f, x), evaluate(h, x))


def test_min_if_convex_examples():
    f = MaxAffine((((0,), 0), ((1,), 0)))
    h = MaxAffine((((0,), 0), ((-1,), 0)))
    m = min_if_convex(f, h)
    assert m is not None and m.canonical() == MaxAffine((((0,), 0),))
    assert min_if_convex(ABS1, MaxAffine((((1,), -2), ((-1,), 2)))) is None
    big = MaxAffine((((1,), 1), ((-1,), 1)))
    assert min_if_convex(ABS1, big).canonical() == ABS1.canonical()


def test_min_if_convex_rejects_nonconvex_by_midpoint():
    # breakpoints of pieces with integer data in [-3, 3] are rationals with denominator <= 6
    # inside |x| <= 6, so a 1/120 grid sees every kink
    rng = random.Random(3)
    for _ in range(40):
        f, h = random_max_affine(rng, 1, 3), random_max_affine(rng, 1, 3)
        m = min_if_convex(f, h)
        grid = [F(i, 120) for i in range(-840, 841)]
        vals = [min(evaluate(f, (x,)), evaluate(h, (x,))) for x in grid]
        convex = all(2 * vals[i] <= vals[i - 1] + vals[i + 1] for i in range(1, len(grid) - 1))
        if m is None:
            assert not convex
        else:
            assert all(evaluate(m, (x,)) == v for x, v in zip(grid, vals))


def test_valuation_pairs_partition_values():
    rng = random.Random(11)
    for n in (1, 2, 3):
        for _ in range(5):
            f, h, mx, mn = valuation_pair(rng, n)
            for _ in range(20):
                x = rpoint(rng, n)
                assert evaluate(mn, x) == min(evaluate(f, x), evaluate(h, x))
                assert evaluate(f, x) + evaluate(h, x) == evaluate(mx, x) + evaluate(mn, x)


def test_subdifferential_examples():
    assert set(subdifferential(abs_sum(2), (0, 0)).vertices) == {(1, 1), (1, -1), (-1, 1), (-1, -1)}
    assert subdifferential(abs_sum(2), (1, 2)).vertices == ((1, 1),)
    aff = MaxAffine((((2, 3), 1),))
    assert subdifferential(aff, (5, -1)).vertices == ((2, 3),)


@given(max_affines, st.integers(0, 10**6))
def test_subdifferential_monotone(f, seed):
    rng = random.Random(seed)
    x, x2 = rpoint(rng, f.n), rpoint(rng, f.n)
    for a in subdifferential(f, x).vertices:
        for a2 in subdifferential(f, x2).vertices:
            assert sum((p - q) * (s - t) for p, q, s, t in zip(a, a2, x, x2)) >= 0


@given(max_affines, st.integers(0, 10**6))
def test_add_affine_and_scale(f, seed):
    rng = random.Random(seed)
    ell = AffineMap(rpoint(rng, f.n), F(rng.randint(-3, 3)))
    g = add_affine(f, ell)
    for _ in range(10):
        x = rpoint(rng, f.n)
        assert evaluate(g, x) == evaluate(f, x) + ell(x)
    assert scale(f, 1) == f
    with pytest.raises(ConvexFunctionError):
        scale(f, -1)


def test_json_round_trip():
    fs = [abs_sum(2), Quadratic(((1, 0), (0, 2)), (1, 0), 3), SupportFn(box_polytope((0, 0), (1, 1)), (1, 1))]
    for f in fs:
        g = from_json(to_json(f))
        rng = random.Random(0)
        for _ in range(10):
            x = rpoint(rng, 2)
            assert evaluate(f, x) == evaluate(g, x)
