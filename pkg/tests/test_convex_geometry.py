import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from maval.convex_geometry import (
    GeometryError,
    box_polytope,
    convex_hull,
    cross_polytope,
    minkowski_sum,
    mixed_volume,
    support_eval,
    volume,
)

F = Fraction
SQUARE = box_polytope((0, 0), (1, 1))
DIAMOND = cross_polytope(2)

points2 = st.lists(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), min_size=3, max_size=9)
points3 = st.lists(st.tuples(*[st.integers(-3, 3)] * 3), min_size=4, max_size=9)


def scipy_volume(pts):
    arr = np.array([[float(x) for x in p] for p in pts])
    try:
        return ConvexHull(arr).volume
    except Exception:  # flat input
        return 0.0


def test_hull_examples():
    P = convex_hull([(0, 0), (1, 0), (0, 1), (F(1, 4), F(1, 4))])
    assert set(P.vertices) == {(0, 0), (1, 0), (0, 1)}
    assert convex_hull([(2, 3)]).vertices == ((2, 3),)
    with pytest.raises(GeometryError):
        convex_hull([(0, 0), (1, 2, 3)])


def test_hull_lp_oracle():
    rng = random.Random(5)
    for _ in range(50):
        pts = [tuple(rng.randint(-3, 3) for _ in range(3)) for _ in range(rng.randint(4, 10))]
        V = convex_hull(pts).vertices
        Vm = np.array([[float(x) for x in v] for v in V]).T
        for p in pts:
            A = np.vstack([Vm, np.ones(len(V))])
            b = np.array([float(x) for x in p] + [1.0])
            res = linprog(np.zeros(len(V)), A_eq=A, b_eq=b, bounds=[(0, None)] * len(V), method="highs")
            assert res.status == 0


def test_volume_examples():
    assert volume(SQUARE) == 1
    assert volume(convex_hull([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])) == F(1, 6)
    assert volume(DIAMOND) == 2
    assert volume(convex_hull([(0, 0), (1, 1), (2, 2)])) == 0


@given(points2)
def test_volume_vs_scipy_2d(pts):
    assert abs(float(volume(convex_hull(pts))) - scipy_volume(pts)) < 1e-9


@given(points3)
def test_volume_vs_scipy_3d(pts):
    assert abs(float(volume(convex_hull(pts))) - scipy_volume(pts)) < 1e-9


def test_minkowski_examples():
    origin = convex_hull([(0, 0)])
    assert minkowski_sum(SQUARE, origin).vertices == SQUARE.vertices
    oct_ = minkowski_sum(SQUARE, DIAMOND)
    assert len(oct_.vertices) == 8 and volume(oct_) == 7


@given(points2)
def test_p_plus_p_is_2p(pts):
    P = convex_hull(pts)
    assert minkowski_sum(P, P).vertices == P.dilate(2).vertices


def test_mixed_volume_examples():
    assert mixed_volume(SQUARE, DIAMOND) == 2
    rng = random.Random(9)
    for _ in range(10):
        K = convex_hull([tuple(rng.randint(-3, 3) for _ in range(3)) for _ in range(6)])
        assert mixed_volume(K, K, K) == volume(K)


@given(points2, points2, st.tuples(st.fractions(-3, 3, max_denominator=5), st.fractions(-3, 3, max_denominator=5)))
def test_mixed_volume_laws(a, b, t):
    K, L = convex_hull(a), convex_hull(b)
    assert mixed_volume(K.translate(t), L) == mixed_volume(K, L)
    assert mixed_volume(K, L) == mixed_volume(L, K)
    assert volume(minkowski_sum(K, L)) == volume(K) + 2 * mixed_volume(K, L) + volume(L)


@given(points2, points2, points2, st.fractions(0, 3, max_denominator=4), st.fractions(0, 3, max_denominator=4))
def test_mixed_volume_multilinear(a, b, c, s, t):
    K, L, M = convex_hull(a), convex_hull(b), convex_hull(c)
    comb = minkowski_sum(K.dilate(s), L.dilate(t))
    assert mixed_volume(comb, M) == s * mixed_volume(K, M) + t * mixed_volume(L, M)


def test_support_examples():
    assert support_eval(SQUARE, (1, 0)) == 1
    assert support_eval(convex_hull([(1, 1)]), (-1, 0)) == -1
    with pytest.raises(GeometryError):
        support_eval(SQUARE, (1, 0, 0))


@given(points2, st.tuples(st.integers(-5, 5), st.integers(-5, 5)), st.tuples(st.integers(-5, 5), st.integers(-5, 5)))
def test_support_subadditive(pts, y, z):
    P = convex_hull(pts)
    yz = tuple(a + b for a, b in zip(y, z))
    assert support_eval(P, yz) <= support_eval(P, y) + support_eval(P, z)


@given(points3, st.permutations([0, 1, 2]), st.tuples(*[st.integers(-5, 5)] * 3))
def test_volume_invariances(pts, perm, t):
    P = convex_hull(pts)
    Q = convex_hull([tuple(p[i] for i in perm) for p in pts])
    assert volume(Q) == volume(P) == volume(P.translate(t))


def test_edges_of_square():
    assert len(SQUARE.edges()) == 4
    assert len(convex_hull([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]).edges()) == 6
