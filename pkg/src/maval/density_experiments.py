"""GL transport, Riemann-sum translation averages, and spanning-rank certificates."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product
from math import factorial

import numpy as np

from .convex_functions import Combo, MaxAffine, Quadratic, SupportFn, essential_pieces
from .exact_poly import Polynomial, PolynomialError, VariableRegistry
from .linalg import det, symbolic_det
from .ma_operators import LocalFunctional, invariant_registry
from .minor_spaces import hessian_name, hessian_registry, n_nk
from .valuation_lab import q_polynomial, q_rank
from .weights import ConstantWeight, Weight, box_intersect


class DensityError(ValueError):
    pass


# ---------------------------------------------------------------------------
# GL action


def _frac_matrix(g):
    G = [[Fraction(v) for v in row] for row in g]
    if any(len(r) != len(G) for r in G):
        raise DensityError("g must be square")
    return G


def gl_transport(P: Polynomial, g) -> Polynomial:
    """Transport of an invariant part or a Q-polynomial by g in GL(n).

    Invariant parts: P(c, y, s) -> |det g|^{-1} P(c, g^T y, g^T s g).
    Column polynomials: Q(w_1..w_k) -> |det g|^{-1} Q(g^T w_1, ..., g^T w_k).
    Both follow from [pi(g) Psi](f; B) = Psi(f o g; g^{-1} B) and compose as
    T_g T_h = T_{gh}.
    """
    G = _frac_matrix(g)
    n = len(G)
    dg = det(G)
    if dg == 0:
        raise DensityError("g is singular")
    reg = P.registry
    names = set(reg.names)
    mapping = {}
    if any(nm.startswith("s_") for nm in names) or "c" in names or any(nm.startswith("y_") for nm in names):
        for i in range(1, n + 1):
            nm = f"y_{i}"
            if nm in names:
                mapping[nm] = sum((Polynomial.var(reg, f"y_{a}").scale(G[a - 1][i - 1])
                                   for a in range(1, n + 1) if G[a - 1][i - 1]), Polynomial.zero(reg))
        for i in range(1, n + 1):
            for j in range(i, n + 1):
                nm = hessian_name(i, j)
                if nm not in names:
                    continue
                acc = Polynomial.zero(reg)
                for a in range(1, n + 1):
                    for b in range(1, n + 1):
                        c = G[a - 1][i - 1] * G[b - 1][j - 1]
                        if c:
                            acc = acc + Polynomial.var(reg, hessian_name(a, b)).scale(c)
                mapping[nm] = acc
    else:
        cols = {}
        for nm in reg.names:
            parts = nm.split("_")
            if len(parts) != 3 or parts[0] != "w":
                raise DensityError(f"cannot transport variable {nm!r}")
            cols.setdefault(int(parts[2]), set()).add(int(parts[1]))
        for j, rows in cols.items():
            if rows != set(range(1, n + 1)):
                raise DensityError("column variables do not match the size of g")
            for i in range(1, n + 1):
                mapping[f"w_{i}_{j}"] = sum((Polynomial.var(reg, f"w_{a}_{j}").scale(G[a - 1][i - 1])
                                             for a in range(1, n + 1) if G[a - 1][i - 1]), Polynomial.zero(reg))
    return P.substitute(mapping, reg).scale(1 / abs(dg))


def random_gl(rng: random.Random, n: int, lo: int = -3, hi: int = 3, det_range=(1, 100), max_tries: int = 1000):
    for _ in range(max_tries):
        g = [[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)]
        d = abs(det([[Fraction(v) for v in r] for r in g]))
        if det_range[0] <= d <= det_range[1]:
            return g
    raise DensityError("no admissible GL sample")


def matmul(g, h):
    return [[sum(Fraction(g[i][k]) * Fraction(h[k][j]) for k in range(len(h))) for j in range(len(h[0]))] for i in range(len(g))]


# ---------------------------------------------------------------------------
# translation averages


@dataclass(frozen=True, eq=False)
class RiemannSumWeight(Weight):
    """eps^n sum_{|k|_inf <= K} base(x - eps k)."""

    base: Weight
    eps: Fraction
    K: int

    @property
    def n(self):
        return self.base.n

    def support(self):
        b = self.base.support()
        if b is None:
            return None
        r = self.eps * self.K
        return tuple((lo - r, hi + r) for lo, hi in b)

    def count(self):
        return (2 * self.K + 1) ** self.n

    def __call__(self, X):
        X = np.asarray(X, dtype=float)
        n, eps = self.n, float(self.eps)
        b = self.base.support()
        out = np.zeros(X.shape[:-1])
        flat = X.reshape(-1, n)
        # only shifts whose translated support meets the sample points contribute
        ranges = []
        for i in range(n):
            if b is None:
                ranges.append(range(-self.K, self.K + 1))
                continue
            lo = int(np.floor((flat[:, i].min() - float(b[i][1])) / eps)) - 1
            hi = int(np.ceil((flat[:, i].max() - float(b[i][0])) / eps)) + 1
            ranges.append(range(max(lo, -self.K), min(hi, self.K) + 1))
        acc = np.zeros(flat.shape[0])
        for k in product(*ranges):
            acc += self.base(flat - eps * np.array(k, dtype=float))
        out = acc.reshape(X.shape[:-1])
        return eps**n * out


@dataclass
class AverageReport:
    functional: LocalFunctional
    eps: Fraction
    K: int
    window: tuple
    limits: list  # integral of each phi_j
    sup_distance: list  # per term, sampled on the window

    def to_json(self):
        from .serialize import rat

        return {"eps": rat(self.eps), "K": self.K, "window": [[rat(a), rat(b)] for a, b in self.window],
                "limits": [float(v) for v in self.limits], "sup_distance": [float(v) for v in self.sup_distance]}


def translation_average(psi: LocalFunctional, K: int, eps, window=None, samples: int = 201, nodes: int = 200):
    """eps^n sum_{|k|_inf <= K} pi(eps k) Psi, with the sup-distance of each weight to its integral.

    pi(x) maps phi • Psi_P to phi(. - x) • Psi_P.
    """
    from .weights import integrate_weight

    eps = Fraction(eps)
    n = psi.n
    terms, limits, dists = [], [], []
    window = tuple((Fraction(lo), Fraction(hi)) for lo, hi in (window or [(-1, 1)] * n))
    axes = [np.linspace(float(lo), float(hi), samples if n == 1 else max(21, int(samples ** (1 / n)) * 2 + 1))
            for lo, hi in window]
    grid = np.stack([m.reshape(-1) for m in np.meshgrid(*axes, indexing="ij")], axis=-1)
    for w, P in psi.terms:
        if isinstance(w, ConstantWeight):
            cnt = (2 * K + 1) ** n
            avg = ConstantWeight(n, w.value * cnt * eps**n)
            terms.append((avg, P))
            limits.append(float(avg.value))
            dists.append(0.0)
            continue
        supp = w.support()
        if supp is None:
            raise DensityError("translation averages need compactly supported or constant weights")
        avg = RiemannSumWeight(w, eps, K)
        terms.append((avg, P))
        lim = float(integrate_weight(w, supp, nodes=nodes))
        limits.append(lim)
        dists.append(float(np.max(np.abs(avg(grid) - lim))))
    return AverageReport(LocalFunctional(n, tuple(terms)), eps, K, window, limits, dists)


def square_schedule(m: int):
    """(K, eps) = (m^2, 1/m)."""
    return m * m, Fraction(1, m)


# ---------------------------------------------------------------------------
# spanning rank


def mixed_discriminant_P(H, n: int, k: int) -> Polynomial:
    """P(s) = D(s[k], H_1, ..., H_{n-k}), normalised so that D(A, ..., A) = det A."""
    H = [[[Fraction(v) for v in r] for r in M] for M in H]
    if len(H) != n - k:
        raise DensityError(f"need {n - k} matrices, got {len(H)}")
    names = list(hessian_registry(n).names) + ["lam"] + [f"mu_{j}" for j in range(1, n - k + 1)]
    reg = VariableRegistry(names)
    lam = Polynomial.var(reg, "lam")
    mus = [Polynomial.var(reg, f"mu_{j}") for j in range(1, n - k + 1)]
    M = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, n + 1):
            e = lam * Polynomial.var(reg, hessian_name(i, j))
            for mu, Hm in zip(mus, H):
                if Hm[i - 1][j - 1]:
                    e = e + mu.scale(Hm[i - 1][j - 1])
            row.append(e)
        M.append(row)
    D = symbolic_det(M)
    m = len(hessian_registry(n))
    want = (k,) + (1,) * (n - k)
    out = {mono[:m]: c * Fraction(factorial(k), factorial(n)) for mono, c in D.terms.items() if mono[m:] == want}
    ireg = invariant_registry(n)
    return Polynomial._raw(hessian_registry(n), out).embed(ireg)


def hessian_data(f):
    """Symmetric matrices standing in for the (distributional) Hessian of f.

    Quadratics give 2A.  Piecewise-linear functions give the rank-one
    matrices (u - u')(u - u')^T over pairs of adjacent gradients (polytope
    edges for support functions, all essential pairs for general max-affine
    functions).  Affine functions give nothing.
    """
    if isinstance(f, Quadratic):
        H = f.hessian()
        return [] if all(v == 0 for r in H for v in r) else [H]
    if isinstance(f, SupportFn):
        pairs = f.P.edges()
    elif isinstance(f, MaxAffine):
        grads = [a for a, _ in essential_pieces(f.pieces)]
        pairs = list(combinations(grads, 2))
    elif isinstance(f, Combo):
        out = []
        for w, g in f.terms:
            if w:
                out.extend(hessian_data(g))
        return _dedupe(out)
    else:
        raise DensityError(f"no Hessian data for {type(f).__name__}")
    out = []
    for u, v in pairs:
        d = [a - b for a, b in zip(u, v)]
        out.append(tuple(tuple(x * y for y in d) for x in d))
    return _dedupe(out)


def _dedupe(mats):
    seen, out = set(), []
    for M in mats:
        key = tuple(tuple(Fraction(v) for v in r) for r in M)
        if key not in seen:
            seen.add(key)
            out.append(key)
    return out


@dataclass
class SpanningReport:
    n: int
    k: int
    family: list
    rank: int
    N: int
    q_polys: list
    seed: int
    g_samples: int
    note: str = ("finite rank certificate: necessary-side evidence for density only; "
                 "closure and topology are not computed")

    @property
    def dichotomy(self) -> bool:
        return self.rank in (0, self.N)

    def to_json(self):
        return {"n": self.n, "k": self.k, "family": self.family, "rank": self.rank, "N": self.N,
                "dichotomy": self.dichotomy, "q_polys": self.q_polys, "seed": self.seed,
                "g_samples": self.g_samples, "note": self.note}


def gl_samples(n: int, count: int, seed: int):
    rng = random.Random(seed)
    ident = [[int(i == j) for j in range(n)] for i in range(n)]
    return [ident] + [random_gl(rng, n) for _ in range(count)]


def spanning_invariant_parts(family, n: int, k: int):
    data = []
    for f in family:
        data.extend(hessian_data(f))
    data = _dedupe(data)
    if k == n:
        return [mixed_discriminant_P([], n, n)]
    parts = []
    for combo in combinations_with_replacement(range(len(data)), n - k):
        P = mixed_discriminant_P([data[i] for i in combo], n, k)
        if not P.is_zero():
            parts.append(P)
    return parts


def spanning_rank(family, n: int, k: int, g_samples: int | None = None, seed: int = 0, describe=None) -> SpanningReport:
    """Exact rank of the Q-polynomials of GL transports of mixed-MA functionals built from the family.

    ``g_samples`` defaults to N_{n,k}: a single invariant part then has N + 1 transports,
    enough for its orbit to reach full rank when it can.
    """
    if any(f.n != n for f in family):
        raise DensityError("family members must live on R^n")
    if g_samples is None:
        g_samples = n_nk(n, k)
    parts = spanning_invariant_parts(family, n, k)
    gs = gl_samples(n, g_samples, seed)
    Qs = []
    for P in parts:
        for g in gs:
            Qs.append(q_polynomial(gl_transport(P, g), k, n))
    r = q_rank(Qs, n, k)
    return SpanningReport(n, k, describe or [type(f).__name__ for f in family], r, n_nk(n, k),
                          sorted({str(q.poly) for q in Qs}), seed, g_samples)
