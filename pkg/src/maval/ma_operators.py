"""Monge–Ampère measures, mixed MA, and translation-invariant local functionals.

For a max-affine f = max_i <a_i, x> + b_i the MA measure is atomic: each vertex
x of the region complex carries the volume of the subdifferential
conv{a_i : i active at x}.  Vertices are read off the lower facets of the
lifted point set {(a_i, -b_i)}: a lower facet lying in the hyperplane
t = <u, a> + g corresponds to the vertex x = u.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from math import factorial

import numpy as np

from .convex_functions import (
    Combo,
    ConvexFunctionError,
    MaxAffine,
    Quadratic,
    SupportFn,
    as_max_affine,
    essential_pieces,
    subdifferential,
)
from .convex_geometry import convex_hull, hull_data, mixed_volume
from .exact_poly import Polynomial, PolynomialError, VariableRegistry
from .linalg import det, rank, solve
from .minor_spaces import hessian_minor_space, hessian_name, hessian_registry
from .weights import (
    ConstantWeight,
    PolynomialWeight,
    ProductWeight,
    Weight,
    box_intersect,
    in_box,
    integrate_polynomial,
    is_full_dimensional,
    quad_box,
    x_registry,
)


class MAError(ValueError):
    pass


class InvariantViolation(RuntimeError):
    """Two computation paths that must agree exactly did not."""


# ---------------------------------------------------------------------------
# measures


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite atomic measure plus an optional list of polynomial densities on boxes."""

    atoms: tuple = ()  # ((point, weight), ...) sorted by point, no zero weights
    density: tuple = ()  # ((box, Polynomial in x_1..x_n), ...)

    @staticmethod
    def from_atoms(pairs, density=()):
        acc = {}
        for x, w in pairs:
            x = tuple(Fraction(v) for v in x)
            acc[x] = acc.get(x, 0) + w
        return AtomicMeasure(tuple(sorted((x, w) for x, w in acc.items() if w != 0)), tuple(density))

    def __add__(self, other):
        return AtomicMeasure.from_atoms(self.atoms + other.atoms, self.density + other.density)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, t):
        return AtomicMeasure.from_atoms([(x, t * w) for x, w in self.atoms],
                                        [(b, p.scale(t)) for b, p in self.density])

    def restrict(self, box):
        return AtomicMeasure.from_atoms([(x, w) for x, w in self.atoms if in_box(x, box)],
                                        [(b2, p) for b, p in self.density if (b2 := box_intersect(b, box))])

    @property
    def total_mass(self):
        total = sum((w for _, w in self.atoms), Fraction(0))
        for b, p in self.density:
            total += integrate_polynomial(p, b)
        return total

    def points(self):
        return [x for x, _ in self.atoms]

    def is_zero(self):
        return not self.atoms and all(p.is_zero() for _, p in self.density)

    def to_json(self):
        from .serialize import num, rat

        out = {"atoms": [{"x": [rat(v) for v in x], "w": num(w)} for x, w in self.atoms]}
        if self.density:
            out["density"] = [{"box": [[rat(a), rat(b)] for a, b in bx], "poly": str(p)} for bx, p in self.density]
        return out


# ---------------------------------------------------------------------------
# discrete MA


def _check_window(window, n):
    if window is None:
        return None
    window = tuple((Fraction(lo), Fraction(hi)) for lo, hi in window)
    if len(window) != n:
        raise MAError(f"window has dimension {len(window)}, function has {n}")
    if not is_full_dimensional(window):
        raise MAError("window is not full-dimensional")
    return window


def _as_pl(f) -> MaxAffine:
    if isinstance(f, MaxAffine):
        return f
    if isinstance(f, (SupportFn, Combo)):
        return as_max_affine(f)
    raise MAError(f"discrete MA needs a piecewise-linear function, got {type(f).__name__}")


def complex_vertices(f):
    """Vertices of the region complex with their active gradient sets.

    Returns ``[(x, [a_i active at x])]``; only vertices whose subdifferential is
    full-dimensional are listed.
    """
    f = _as_pl(f)
    n = f.n
    pcs = essential_pieces(f.pieces)
    if len(pcs) <= n:
        return []
    grads = [a for a, _ in pcs]
    if rank([[x - y for x, y in zip(a, grads[0])] for a in grads[1:]]) < n:
        return []
    lifted = [a + (-b,) for a, b in pcs]
    hd = hull_data(lifted)
    if hd.dim == n:
        # all pieces meet in a single point u with <u, a_i> + g = -b_i
        rows = [list(a) + [Fraction(1)] for a in grads]
        sol = solve(rows, [-b for _, b in pcs])
        if sol is None:  # pragma: no cover - dim == n with spanning gradients
            raise MAError("inconsistent lifted hyperplane")
        return [(tuple(sol[:n]), grads)]
    out = []
    for (nrm, off), idx in hd.facet_planes().items():
        if nrm[n] >= 0:
            continue  # upper or vertical facet
        u = tuple(Fraction(-v, nrm[n]) for v in nrm[:n])
        active = sorted({hd.points[i][:n] for i in idx})
        out.append((u, active))
    return sorted(out)


def discrete_ma(f, window=None) -> AtomicMeasure:
    """Aleksandrov MA measure of a max-affine function, restricted to a closed box."""
    f = _as_pl(f)
    if f.n > 3:
        raise MAError("discrete MA is implemented for n <= 3")
    window = _check_window(window, f.n)
    atoms = []
    for x, active in complex_vertices(f):
        if window is not None and not in_box(x, window):
            continue
        atoms.append((x, convex_hull(active).volume))
    return AtomicMeasure.from_atoms(atoms)


def sum_max_affine(fs) -> MaxAffine:
    """f_1 + ... + f_m as a MaxAffine (products of pieces, pruned)."""
    fs = [_as_pl(f).canonical() for f in fs]
    pieces = [((Fraction(0),) * fs[0].n, Fraction(0))]
    for f in fs:
        pieces = list(essential_pieces([
            (tuple(x + y for x, y in zip(a1, a2)), b1 + b2) for a1, b1 in pieces for a2, b2 in f.pieces
        ]))
    return MaxAffine(tuple(pieces))


def _mixed_by_volumes(fs, window):
    n = fs[0].n
    atoms = []
    for x, _ in complex_vertices(sum_max_affine(fs)):
        if window is not None and not in_box(x, window):
            continue
        atoms.append((x, mixed_volume([subdifferential(f, x) for f in fs])))
    return AtomicMeasure.from_atoms(atoms)


def _mixed_by_polarization(fs, window):
    # multilinear coefficient of lambda -> MA(sum lambda_j f_j) from the {0,1}^n corners
    n = len(fs)
    total = AtomicMeasure()
    for size in range(1, n + 1):
        sign = 1 if (n - size) % 2 == 0 else -1
        for S in combinations(range(n), size):
            m = discrete_ma(sum_max_affine([fs[j] for j in S]), window)
            total = total + (m if sign > 0 else m.scale(-1))
    return total.scale(Fraction(1, factorial(n)))


def mixed_ma_discrete(fs, window=None, path="both") -> AtomicMeasure:
    """Mixed MA measure MA(f_1, ..., f_n) of max-affine functions.

    ``path`` selects "volumes" (mixed volumes of subdifferentials at the
    vertices of the common refinement), "polarization" (inclusion-exclusion
    over subset sums) or "both", which computes both and raises
    :class:`InvariantViolation` unless they agree exactly.
    """
    fs = [_as_pl(f) for f in fs]
    if not fs:
        raise MAError("mixed MA needs at least one function")
    n = fs[0].n
    if any(f.n != n for f in fs) or len(fs) != n:
        raise MAError(f"mixed MA in R^{n} needs {n} functions of dimension {n}")
    if n > 3:
        raise MAError("discrete MA is implemented for n <= 3")
    window = _check_window(window, n)
    if path == "volumes":
        return _mixed_by_volumes(fs, window)
    if path == "polarization":
        return _mixed_by_polarization(fs, window)
    a, b = _mixed_by_volumes(fs, window), _mixed_by_polarization(fs, window)
    if a != b:
        raise InvariantViolation(f"mixed MA paths disagree: {a.to_json()} vs {b.to_json()}")
    return a


# ---------------------------------------------------------------------------
# smooth MA


@dataclass(frozen=True, eq=False)
class SmoothFunction:
    """A C^2 function given by vectorised callables on arrays of shape (..., n)."""

    n: int
    value: object
    gradient: object  # X -> (..., n)
    hessian: object  # X -> (..., n, n)


def quadratic_numeric(q: Quadratic) -> SmoothFunction:
    A = np.array([[float(v) for v in r] for r in q.A])
    l = np.array([float(v) for v in q.l])
    c = float(q.c)
    H = 2 * A
    return SmoothFunction(
        q.n,
        lambda X: np.einsum("...i,ij,...j->...", X, A, X) + X @ l + c,
        lambda X: X @ (2 * A) + l,
        lambda X: np.broadcast_to(H, X.shape[:-1] + H.shape),
    )


def exact_ma(q: Quadratic, phi: Weight, box):
    """det(2A) times the exact integral of a polynomial weight over the box."""
    if not isinstance(q, Quadratic):
        raise MAError("the exact MA path needs a Quadratic")
    e = phi.exact()
    if e is None:
        raise MAError("the exact MA path needs a polynomial weight")
    b = box_intersect(tuple((Fraction(lo), Fraction(hi)) for lo, hi in box), e[1])
    if not b:
        return Fraction(0)
    return det([list(r) for r in q.hessian()]) * integrate_polynomial(e[0], b)


def quadrature_ma(f, phi: Weight, box, nodes=32) -> float:
    """Tensor Gauss–Legendre value of the integral of phi * det(D^2 f) over the box."""
    if isinstance(f, Quadratic):
        f = quadratic_numeric(f)
    if not isinstance(f, SmoothFunction):
        raise MAError(f"quadrature MA needs a Quadratic or SmoothFunction, got {type(f).__name__}")
    box = tuple((Fraction(lo), Fraction(hi)) for lo, hi in box)
    b = box_intersect(box, phi.support())
    if not b:
        return 0.0
    return float(quad_box(lambda X: phi(X) * np.linalg.det(f.hessian(X)), b, nodes))


# ---------------------------------------------------------------------------
# invariant local functionals


@lru_cache(maxsize=None)
def invariant_registry(n: int) -> VariableRegistry:
    """Variables ``c, y_1..y_n, s_i_j (i <= j)`` for value, gradient and Hessian."""
    names = ["c"] + [f"y_{i}" for i in range(1, n + 1)] + list(hessian_registry(n).names)
    return VariableRegistry(names)


def _split_cy(P: Polynomial, n: int):
    """Group P by its (c, y)-monomial: {cy-exponent: polynomial in s}."""
    hreg = hessian_registry(n)
    parts = {}
    for m, c in P.terms.items():
        key, rest = m[: n + 1], m[n + 1:]
        parts.setdefault(key, {})[rest] = c
    return {k: Polynomial._raw(hreg, v) for k, v in parts.items()}


def check_invariant_part(P: Polynomial, n: int) -> Polynomial:
    """Re-express P over the invariant registry and verify its s-part lies in the Hessian-minor span."""
    reg = invariant_registry(n)
    if P.registry != reg:
        try:
            P = P.embed(reg)
        except PolynomialError as exc:
            raise MAError(f"{P} is not a polynomial in (c, y, s) for n={n}") from exc
    space = hessian_minor_space(n)
    for key, R in _split_cy(P, n).items():
        if space.coordinates(R) is None:
            raise MAError(f"Hessian part {R} is outside the span of the minors")
    return P


def det_part(n: int) -> Polynomial:
    """det of the symmetric Hessian matrix in the invariant registry."""
    from .linalg import symbolic_det

    reg = invariant_registry(n)
    S = [[Polynomial.var(reg, hessian_name(i, j)) for j in range(1, n + 1)] for i in range(1, n + 1)]
    return symbolic_det(S)


def _quadratic_polys(q: Quadratic):
    reg = x_registry(q.n)
    xs = [Polynomial.var(reg, f"x_{i}") for i in range(1, q.n + 1)]
    val = Polynomial.constant(reg, q.c)
    grads = []
    for i in range(q.n):
        val = val + xs[i].scale(q.l[i])
        g = Polynomial.constant(reg, q.l[i])
        for j in range(q.n):
            if q.A[i][j]:
                val = val + (xs[i] * xs[j]).scale(q.A[i][j])
                g = g + xs[j].scale(2 * q.A[i][j])
        grads.append(g)
    return val, grads


def pullback(P: Polynomial, q: Quadratic) -> Polynomial:
    """x -> P(q(x), dq(x), D^2 q) as an exact polynomial in x."""
    n = q.n
    P = check_invariant_part(P, n)
    val, grads = _quadratic_polys(q)
    reg = x_registry(n)
    H = q.hessian()
    mapping = {"c": val}
    for i in range(n):
        mapping[f"y_{i + 1}"] = grads[i]
        for j in range(i, n):
            mapping[hessian_name(i + 1, j + 1)] = Polynomial.constant(reg, H[i][j])
    return P.substitute(mapping, reg)


def _numeric_integrand(P: Polynomial, f: SmoothFunction):
    n = f.n
    fn = P.to_callable()
    idx = [(i, j) for i in range(n) for j in range(i, n)]

    def g(X):
        v, G, H = f.value(X), f.gradient(X), f.hessian(X)
        args = [v] + [G[..., i] for i in range(n)] + [H[..., i, j] for i, j in idx]
        out = fn(*args)
        return np.broadcast_to(out, X.shape[:-1])

    return g


def invariant_functional_apply(P: Polynomial, f, phi: Weight, box, nodes=32, mode="auto"):
    """Integral over the box of phi(x) * P(f(x), df(x), D^2 f(x)).

    Exact (a Fraction) when f is quadratic and phi polynomial, unless
    ``mode="quadrature"``; otherwise tensor Gauss–Legendre.
    """
    n = phi.n
    P = check_invariant_part(P, n)
    box = tuple((Fraction(lo), Fraction(hi)) for lo, hi in box)
    if isinstance(f, (Combo, SupportFn, MaxAffine)):
        raise MAError("invariant functionals are evaluated on quadratic or smooth inputs")
    e = phi.exact()
    if mode != "quadrature" and isinstance(f, Quadratic) and e is not None:
        b = box_intersect(box, e[1])
        if not b:
            return Fraction(0)
        return integrate_polynomial(pullback(P, f) * e[0], b)
    if mode == "exact":
        raise MAError("exact evaluation needs a quadratic input and a polynomial weight")
    sf = quadratic_numeric(f) if isinstance(f, Quadratic) else f
    b = box_intersect(box, phi.support())
    if not b:
        return 0.0
    integrand = _numeric_integrand(P, sf)
    return complex(quad_box(lambda X: phi(X) * integrand(X), b, nodes)).real if P.is_real() else complex(
        quad_box(lambda X: phi(X) * integrand(X), b, nodes))


@dataclass(frozen=True, eq=False)
class LocalFunctional:
    """Sum over terms of phi_j • Psi_{P_j}: B -> integral over B of phi_j P_j(f, df, D^2 f)."""

    n: int
    terms: tuple  # ((Weight, Polynomial), ...)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        terms = []
        for w, P in self.terms:
            if w.n != self.n:
                raise MAError("weight dimension does not match the functional")
            terms.append((w, check_invariant_part(P, self.n)))
        object.__setattr__(self, "terms", tuple(terms))

    @staticmethod
    def invariant(n: int, P: Polynomial):
        return LocalFunctional(n, ((ConstantWeight(n), P),))

    @property
    def degree(self) -> int:
        """Polynomial degree in the value/gradient variables."""
        return max((max((sum(m[: self.n + 1]) for m in P.terms), default=0) for _, P in self.terms), default=0)

    def evaluate(self, f, probe: Weight, box, nodes=32, mode="auto"):
        total = 0
        for w, P in self.terms:
            total = total + invariant_functional_apply(P, f, ProductWeight((probe, w)), box, nodes, mode)
        return total

    def __call__(self, f, probe, box, **kw):
        return self.evaluate(f, probe, box, **kw)

    def density(self, q: Quadratic):
        """Exact polynomial density when every weight is polynomial (cutoff boxes ignored)."""
        reg = x_registry(self.n)
        out = Polynomial.zero(reg)
        for w, P in self.terms:
            e = w.exact()
            if e is None:
                raise MAError("density is symbolic only for polynomial weights")
            out = out + pullback(P, q) * e[0]
        return out

    def local_support(self):
        """Union of the weight supports as a list of boxes (``None`` = all of R^n)."""
        return [w.support() for w, P in self.terms if not P.is_zero()]

    def scale(self, t):
        return LocalFunctional(self.n, tuple((w, P.scale(t)) for w, P in self.terms), dict(self.meta))

    def __add__(self, other):
        return LocalFunctional(self.n, self.terms + other.terms)


def module_action(phi: Weight, psi: LocalFunctional) -> LocalFunctional:
    """phi • Psi: multiply every weight by phi."""
    if phi.n != psi.n:
        raise MAError("dimension mismatch in module action")
    return LocalFunctional(psi.n, tuple((ProductWeight((phi, w)), P) for w, P in psi.terms), dict(psi.meta))


def local_support(psi: LocalFunctional):
    return psi.local_support()
