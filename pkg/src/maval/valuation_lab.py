"""Homogeneous/translative decompositions, Q-polynomials, evaluation maps, reconstruction."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, product

import numpy as np

from .convex_functions import AffineMap, Quadratic, add_affine, ldl_psd, scale
from .exact_poly import Polynomial, PolynomialError, VariableRegistry, monomial_space
from .linalg import coefficient_matrix, rank, solve_columns, vandermonde_inverse
from .ma_operators import (
    LocalFunctional,
    MAError,
    _numeric_integrand,
    check_invariant_part,
    invariant_registry,
    pullback,
    quadratic_numeric,
)
from .minor_spaces import MatrixVariableLayout, hessian_minor_space, hessian_name, hessian_registry, squared_minor_basis
from .weights import CallableWeight, Weight, x_registry

Q_NORMALIZATION_DEFAULT = Fraction(1)


class ValuationLabError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Vandermonde extraction


def _combine(C, values):
    return [sum((c * v for c, v in zip(row, values)), 0) for row in C]


def homogeneous_components(psi: LocalFunctional, f, probe: Weight, box, nodes=32, max_degree=None):
    """Components ``[Psi_0(f), ..., Psi_D(f)]`` with Psi(tf) = sum_k t^k Psi_k(f), D = n + d."""
    D = psi.n + psi.degree if max_degree is None else max_degree
    ts = list(range(D + 1))
    values = [psi.evaluate(scale(f, t), probe, box, nodes=nodes) for t in ts]
    return _combine(vandermonde_inverse(ts), values)


def translative_components(psi: LocalFunctional, f, ell: AffineMap, probe: Weight, box, d=None, nodes=32):
    """``[Y_0, ..., Y_d]`` with Psi(f + t ell) = sum_j t^j Y_j(f), from nodes t = 0..d."""
    d = psi.degree if d is None else d
    values = [psi.evaluate(add_affine(f, AffineMap(tuple(j * v for v in ell.y), j * ell.c)), probe, box, nodes=nodes)
              for j in range(d + 1)]
    return _combine(vandermonde_inverse(range(d + 1)), values)


# ---------------------------------------------------------------------------
# Q-polynomials


@dataclass(frozen=True)
class QPolynomial:
    """An element of M²_k in the column variables w_i_j of Mat_{n,k}."""

    poly: Polynomial
    n: int
    k: int
    coordinates: tuple = field(default=(), compare=False)

    def __post_init__(self):
        basis = squared_minor_basis(self.n, self.k)
        p = self.poly if self.poly.registry == basis.registry else self.poly.embed(basis.registry)
        coords = basis.coordinates(p)
        if coords is None:
            raise ValuationLabError(f"{p} is not in the span of squared k-minors")
        object.__setattr__(self, "poly", p)
        object.__setattr__(self, "coordinates", tuple(coords))

    def __call__(self, W):
        """Evaluate at a complex n x k matrix (columns w_1..w_k)."""
        W = np.asarray(W, dtype=complex)
        args = [W[i, j] for j in range(self.k) for i in range(self.n)]
        return complex(self.poly.to_callable()(*args)) if self.poly.terms else 0j


def _lambda_registry(n, k):
    lay = MatrixVariableLayout(n, k)
    return VariableRegistry([f"lambda_{j}" for j in range(1, k + 1)] + list(lay.registry.names)), lay


def _s_part(P: Polynomial, n: int) -> Polynomial:
    hreg = hessian_registry(n)
    if P.registry == hreg:
        return P
    if P.registry == invariant_registry(n):
        if any(any(m[: n + 1]) for m in P.terms):
            raise ValuationLabError("Q-extraction needs a translation-invariant part free of c and y")
        return Polynomial._raw(hreg, {m[n + 1:]: c for m, c in P.terms.items()})
    try:
        return P.embed(hreg)
    except PolynomialError as exc:
        raise ValuationLabError(f"{P} is not a polynomial in the Hessian variables") from exc


def q_polynomial(P: Polynomial, k: int, n: int, normalization=None) -> QPolynomial:
    """Coefficient of lambda_1...lambda_k in P(sum_j lambda_j y_j y_j^T), y_j the columns of Mat_{n,k}."""
    S = _s_part(P, n)
    if S.terms and (not S.is_homogeneous() or S.degree() != k):
        raise ValuationLabError(f"P must be homogeneous of degree {k} in the Hessian variables")
    if not hessian_minor_space(n).contains(S):
        raise ValuationLabError("P is outside the span of the Hessian minors")
    norm = Q_NORMALIZATION_DEFAULT if normalization is None else Fraction(normalization)
    lay = MatrixVariableLayout(n, k)
    if k == 0:
        return QPolynomial(Polynomial.constant(lay.registry, S.constant_term() * norm), n, 0)
    reg, lay = _lambda_registry(n, k)
    lam = [Polynomial.var(reg, f"lambda_{j}") for j in range(1, k + 1)]
    w = [[Polynomial.var(reg, lay.name(i, j)) for j in range(1, k + 1)] for i in range(1, n + 1)]
    mapping = {}
    for a in range(n):
        for b in range(a, n):
            acc = Polynomial.zero(reg)
            for j in range(k):
                acc = acc + lam[j] * w[a][j] * w[b][j]
            mapping[hessian_name(a + 1, b + 1)] = acc
    full = S.substitute(mapping, reg)
    target = (1,) * k
    out = {m[k:]: c * norm for m, c in full.terms.items() if m[:k] == target}
    return QPolynomial(Polynomial._raw(lay.registry, out), n, k)


def q_rank(Qs, n: int, k: int) -> int:
    rows = []
    for q in Qs:
        if not isinstance(q, QPolynomial):
            q = QPolynomial(q, n, k)
        if (q.n, q.k) != (n, k):
            raise ValuationLabError("Q-polynomials of mixed shape")
        rows.append(list(q.coordinates))
    return rank(rows) if rows else 0


# ---------------------------------------------------------------------------
# evaluation maps


def invariant_basis(n: int, d: int):
    """Basis of Poly_d(A(n)) ⊗ M_n: (c, y)-monomials of degree <= d times minor-basis elements."""
    reg = invariant_registry(n)
    space = hessian_minor_space(n)
    cy = []
    for deg in range(d + 1):
        for combo in combinations_with_replacement(range(n + 1), deg):
            e = [0] * (n + 1)
            for i in combo:
                e[i] += 1
            cy.append(tuple(e))
    cy.sort(key=lambda e: (sum(e), tuple(-v for v in e)))
    out = []
    for e in cy:
        mono = Polynomial.monomial(reg, e + (0,) * (len(reg) - n - 1))
        for R in space.generators:
            out.append(mono * R.embed(reg))
    return out


def quadratic_catalog(n: int, level: int = 0):
    """Convex quadratics <x,Ax> + l(x) + c used by the evaluation maps (deterministic order)."""
    diag = range(0, 2 ** (level + 1) + 1)
    off = range(-(2**level - 1) if level else 0, 2**level + 1)
    cs = range(0, level + 2)
    ls = [(0,) * n]
    for i in range(n):
        for s in ([1] if level == 0 else [1, -1, 2]):
            e = [0] * n
            e[i] = s
            ls.append(tuple(e))
    mats = []
    upper = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for dv in product(diag, repeat=n):
        for ov in product(off, repeat=len(upper)):
            A = [[Fraction(0)] * n for _ in range(n)]
            for i in range(n):
                A[i][i] = Fraction(dv[i])
            for (i, j), v in zip(upper, ov):
                A[i][j] = A[j][i] = Fraction(v)
            if ldl_psd(A):
                mats.append(tuple(tuple(r) for r in A))
    mats.sort(key=lambda A: (sum(abs(v) for r in A for v in r), A))
    out = []
    for c in cs:
        for A in mats:
            for l in ls:
                out.append(Quadratic(A, l, c))
    out.sort(key=lambda q: (q.c, sum(abs(v) for r in q.A for v in r) + sum(abs(v) for v in q.l), q.A, q.l))
    return out


@dataclass(frozen=True)
class EvaluationMap:
    """E_j(Psi) = sum_i c_i Psi(q_i), dual to basis element ``target``."""

    terms: tuple  # ((Fraction c_i, Quadratic q_i), ...)
    target: int
    basis: tuple  # the invariant parts it is dual to
    verified: bool = False
    n: int = 0

    def apply_density(self, P: Polynomial) -> Polynomial:
        """Exact density of E_j(Psi_P) for a translation-invariant part P."""
        out = Polynomial.zero(x_registry(self.n))
        for c, q in self.terms:
            out = out + pullback(P, q).scale(c)
        return out

    def measure(self, psi: LocalFunctional, nodes=32):
        """E_j(Psi) as a functional ``g -> int g dE_j(Psi)`` over a box (black-box evaluations of Psi)."""

        def integrate(g: Weight, box):
            return sum(c * psi.evaluate(q, g, box, nodes=nodes, mode="quadrature") for c, q in self.terms)

        return integrate

    def to_json(self):
        from .serialize import rat

        return {
            "target": self.target,
            "verified": self.verified,
            "terms": [{"c": rat(c), "A": [[rat(v) for v in r] for r in q.A], "l": [rat(v) for v in q.l], "q_c": rat(q.c)}
                      for c, q in self.terms],
        }


def _density_rows(basis, catalog, n):
    dens = [[pullback(P, q) for q in catalog] for P in basis]
    mons = set()
    for row in dens:
        for p in row:
            mons.update(p.terms)
    mons = sorted(mons, reverse=True)
    zero = (0,) * n
    if zero not in mons:
        mons.append(zero)
    col = {m: i for i, m in enumerate(mons)}
    # one equation per (basis element, monomial); unknowns are the catalog coefficients
    A, B = [], []
    N = len(basis)
    for k, row in enumerate(dens):
        for m in mons:
            A.append([p.terms.get(m, Fraction(0)) for p in row])
            B.append([Fraction(int(j == k and m == zero)) for j in range(N)])
    return A, B


class EvaluationMapError(ValuationLabError):
    def __init__(self, missing, level):
        self.missing = list(missing)
        self.certified = level is None
        why = "no convex quadratics realise them" if self.certified else f"catalog level {level} is too small"
        super().__init__(f"no evaluation map for basis elements {self.missing}: {why}")


def _symbolic_quadratic(n):
    """Generic q = <x,Ax> + l(x) + c over a registry of x and the parameters of A, l, c."""
    names = [f"x_{i}" for i in range(1, n + 1)] + [f"a_{i}_{j}" for i in range(1, n + 1) for j in range(i, n + 1)]
    names += [f"l_{i}" for i in range(1, n + 1)] + ["c0"]
    reg = VariableRegistry(names)
    x = [Polynomial.var(reg, f"x_{i}") for i in range(1, n + 1)]
    a = lambda i, j: Polynomial.var(reg, f"a_{min(i, j)}_{max(i, j)}")
    q = Polynomial.var(reg, "c0")
    grads = []
    for i in range(1, n + 1):
        q = q + Polynomial.var(reg, f"l_{i}") * x[i - 1]
        g = Polynomial.var(reg, f"l_{i}")
        for j in range(1, n + 1):
            q = q + a(i, j) * x[i - 1] * x[j - 1]
            g = g + (a(i, j) * x[j - 1]).scale(2)
        grads.append(g)
    mapping = {"c": q}
    for i in range(1, n + 1):
        mapping[f"y_{i}"] = grads[i - 1]
        for j in range(i, n + 1):
            mapping[hessian_name(i, j)] = a(i, j).scale(2)
    return reg, mapping


def reachable_targets(basis, n: int):
    """For each basis element j: can some finite combination of convex quadratics realise E_j?

    The densities of Psi_i(q) are polynomials in x whose coefficients are
    polynomials in the parameters (A, l, c); since convex quadratics form a
    Zariski-dense set of parameters, the span of all realisable coefficient
    vectors is the column space of the parameter-monomial coefficient matrix.
    """
    basis = [check_invariant_part(P, n) for P in basis]
    reg, mapping = _symbolic_quadratic(n)
    cols = {}
    rows = set()
    for k, P in enumerate(basis):
        D = P.substitute(mapping, reg)
        for m, c in D.terms.items():
            xm, pm = m[:n], m[n:]
            rows.add((k, xm))
            cols.setdefault(pm, {})[(k, xm)] = c
    zero = (0,) * n
    rows.update((k, zero) for k in range(len(basis)))
    rows = sorted(rows)
    M = [[cols[pm].get(r, Fraction(0)) for pm in sorted(cols)] for r in rows]
    B = [[Fraction(int(r == (j, zero))) for j in range(len(basis))] for r in rows]
    return [x is not None for x in solve_columns(M, B)]


def build_evaluation_maps(basis, n: int, max_level: int = 2, strict: bool = True):
    """Evaluation maps E_1..E_N with E_j(Psi_{P_i}) = delta_ij * vol, certified exactly.

    Targets that no combination of convex quadratics can realise (decided by
    :func:`reachable_targets`) raise :class:`EvaluationMapError`; with
    ``strict=False`` they come back as ``None`` instead.
    """
    basis = [check_invariant_part(P, n) for P in basis]
    if rank(coefficient_matrix(basis)[0]) != len(basis):
        raise ValuationLabError("the given invariant parts are linearly dependent")
    reachable = reachable_targets(basis, n)
    if strict and not all(reachable):
        raise EvaluationMapError([j for j, r in enumerate(reachable) if not r], None)
    for level in range(max_level + 1):
        catalog = quadratic_catalog(n, level)
        A, B = _density_rows(basis, catalog, n)
        cols = solve_columns(A, B)
        if all(x is not None for x, r in zip(cols, reachable) if r):
            break
    else:
        raise EvaluationMapError([j for j, (x, r) in enumerate(zip(cols, reachable)) if r and x is None], max_level)
    maps = []
    for j, x in enumerate(cols):
        if x is None:
            maps.append(None)
            continue
        terms = tuple((x[i], catalog[i]) for i in range(len(catalog)) if x[i] != 0)
        maps.append(verify_evaluation_map(EvaluationMap(terms, j, tuple(basis), False, n)))
    return maps


def verify_evaluation_map(E: EvaluationMap) -> EvaluationMap:
    for i, P in enumerate(E.basis):
        dens = E.apply_density(P)
        if dens != Polynomial.constant(dens.registry, Fraction(int(i == E.target))):
            raise ValuationLabError(f"E_{E.target} fails the duality check on basis element {i}")
    return EvaluationMap(E.terms, E.target, E.basis, True, E.n)


def apply_evaluation_map(E: EvaluationMap, P: Polynomial) -> Polynomial:
    return E.apply_density(P)


# ---------------------------------------------------------------------------
# reconstruction


@dataclass
class ReconstructionReport:
    value: complex
    reconstructed: complex
    residual: float
    moments: dict = field(default_factory=dict)  # (j, alpha) -> recovered moment

    def to_json(self):
        from .serialize import num

        return {
            "value": num(self.value),
            "reconstructed": num(self.reconstructed),
            "residual": num(self.residual),
            "moments": [{"j": j, "alpha": list(a), "value": num(v)} for (j, a), v in sorted(self.moments.items())],
        }


def reconstruct(psi: LocalFunctional, maps, test_f: Quadratic, probe: Weight, box, nodes=32, moment_degree=0):
    """Compare Psi(test_f)[probe] with sum_j int probe * P_j(f, df, D^2 f) dE_j(Psi).

    ``moment_degree`` > 0 also reports int x^alpha dE_j(Psi) for |alpha| <= moment_degree.
    """
    n = psi.n
    box = tuple((Fraction(lo), Fraction(hi)) for lo, hi in box)
    value = psi.evaluate(test_f, probe, box, nodes=nodes, mode="quadrature")
    sf = quadratic_numeric(test_f)
    pbox = probe.support()
    total = 0.0
    for E in maps:
        P = E.basis[E.target]
        integrand = _numeric_integrand(P, sf)
        g = CallableWeight(n, lambda X, integrand=integrand: probe(X) * integrand(X), pbox)
        total += E.measure(psi, nodes)(g, box)
    report = ReconstructionReport(value, total, float(abs(value - total)))
    if moment_degree:
        for E in maps:
            mu = E.measure(psi, nodes)
            for alpha in _multi_indices(n, moment_degree):
                g = CallableWeight(n, lambda X, a=alpha: np.prod([X[..., i] ** a[i] for i in range(n)], axis=0), None)
                report.moments[(E.target, alpha)] = float(np.real(mu(g, box)))
    return report


def _multi_indices(n, deg):
    out = []
    for total in range(deg + 1):
        for combo in combinations_with_replacement(range(n), total):
            a = [0] * n
            for i in combo:
                a[i] += 1
            out.append(tuple(a))
    return out


def basis_coordinates(P: Polynomial, basis):
    """Coordinates of an invariant part in a basis of invariant parts."""
    from .linalg import span_coordinates

    coords = span_coordinates(P if P.registry == basis[0].registry else P.embed(basis[0].registry), list(basis))
    if coords is None:
        raise ValuationLabError("P is outside the span of the basis")
    return coords
