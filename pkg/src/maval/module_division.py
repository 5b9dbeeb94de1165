"""Gröbner bases and division for Poly(C^n)-submodules of Poly(Mat_{n,k+1}).

The ring Poly(C^n) acts through the last column ``z_1..z_n``.  A module
monomial splits as ``(w-part, z-part)``; ``m1`` divides ``m2`` iff the w-parts
agree and the z-part of ``m1`` divides that of ``m2``.  The term order is lex
in the registry order (all w variables ahead of the z variables).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exact_poly import Polynomial, PolynomialError, VariableRegistry
from .linalg import rank, span_coordinates, symbolic_det
from .minor_spaces import MinorBasis, module_layout, squared_minor_basis


class NonHomogeneousError(PolynomialError):
    pass


class WrongVariablesError(PolynomialError):
    pass


class NotInModuleError(PolynomialError):
    def __init__(self, remainder: Polynomial):
        self.remainder = remainder
        super().__init__(f"not in module; remainder = {remainder}")


class DegenerateSubspaceError(PolynomialError):
    pass


@dataclass(frozen=True)
class GroebnerModuleBasis:
    n: int
    k: int
    generators: tuple
    registry: VariableRegistry
    order: str = "lex(w_1_1 > ... > w_n_k > z_1 > ... > z_n)"
    homogeneous: bool = True
    minimal: bool = True
    division_hypothesis: bool = True

    @property
    def split(self) -> int:
        return self.n * self.k

    def initial_terms(self):
        return [g.leading_term() for g in self.generators]


def _as_module_poly(p: Polynomial, n: int, k: int) -> Polynomial:
    reg = module_layout(n, k).registry
    if p.registry == reg:
        return p
    try:
        return p.embed(reg)
    except PolynomialError as exc:
        raise WrongVariablesError(f"{p} does not live on Mat_{{{n},{k + 1}}}") from exc


def _divides(lead_i, mono, s):
    if lead_i[:s] != mono[:s]:
        return False
    return all(a <= b for a, b in zip(lead_i[s:], mono[s:]))


def _reduce_dict(p: dict, basis, s, registry):
    """Full module reduction of a term dict; returns (remainder dict, quotients)."""
    p = dict(p)
    quotients = [dict() for _ in basis]
    remainder = {}
    leads = [(max(g.terms), g.terms[max(g.terms)]) for g in basis]
    by_w = {}
    for i, (lm, _) in enumerate(leads):
        by_w.setdefault(lm[:s], []).append(i)
    while p:
        m = max(p)
        c = p[m]
        hit = None
        for i in by_w.get(m[:s], ()):
            if _divides(leads[i][0], m, s):
                hit = i
                break
        if hit is None:
            remainder[m] = c
            del p[m]
            continue
        lm, lc = leads[hit]
        shift = tuple(a - b for a, b in zip(m, lm))
        q = c / lc
        qd = quotients[hit]
        qd[shift] = qd.get(shift, 0) + q
        for gm, gc in basis[hit].terms.items():
            mm = tuple(a + b for a, b in zip(gm, shift))
            v = p.get(mm, 0) - q * gc
            if v == 0:
                p.pop(mm, None)
            else:
                p[mm] = v
    return remainder, quotients


def _spoly(f: Polynomial, g: Polynomial, s: int) -> Polynomial:
    lf, lg = max(f.terms), max(g.terms)
    lcm = tuple(max(a, b) for a, b in zip(lf[s:], lg[s:]))
    zero_w = (0,) * s
    sf = zero_w + tuple(a - b for a, b in zip(lcm, lf[s:]))
    sg = zero_w + tuple(a - b for a, b in zip(lcm, lg[s:]))
    return f.mul_monomial(sf, Fraction(1) / f.terms[lf] if not hasattr(f.terms[lf], "im") else 1 / f.terms[lf]) - g.mul_monomial(
        sg, Fraction(1) / g.terms[lg] if not hasattr(g.terms[lg], "im") else 1 / g.terms[lg]
    )


def _monic(p: Polynomial) -> Polynomial:
    lc = p.terms[max(p.terms)]
    return p / lc


def build_groebner(generators, n: int, k: int) -> GroebnerModuleBasis:
    """Reduced (hence minimal) Gröbner basis of the module spanned over Poly(z) by ``generators``."""
    reg = module_layout(n, k).registry
    s = n * k
    gens = []
    for g in generators:
        g = _as_module_poly(g, n, k)
        if g.is_zero():
            continue
        if not g.is_homogeneous():
            raise NonHomogeneousError(f"generator is not homogeneous: {g}")
        if any(any(m[s:]) for m in g.terms):
            raise WrongVariablesError(f"generator uses last-column variables: {g}")
        gens.append(g)
    G = list(gens)
    pairs = [(i, j) for i in range(len(G)) for j in range(i + 1, len(G)) if max(G[i].terms)[:s] == max(G[j].terms)[:s]]
    while pairs:
        i, j = pairs.pop(0)
        S = _spoly(G[i], G[j], s)
        if S.is_zero():
            continue
        r, _ = _reduce_dict(S.terms, G, s, reg)
        if r:
            G.append(Polynomial._raw(reg, r))
            new = len(G) - 1
            lw = max(r)[:s]
            pairs.extend((t, new) for t in range(new) if max(G[t].terms)[:s] == lw)
    # minimalise: drop elements whose initial term is divisible by an earlier kept one
    kept = []
    for idx, g in enumerate(G):
        lg = max(g.terms)
        redundant = False
        for jdx, h in enumerate(G):
            if jdx == idx:
                continue
            lh = max(h.terms)
            if _divides(lh, lg, s) and (lh != lg or jdx < idx):
                redundant = True
                break
        if not redundant:
            kept.append(_monic(g))
    # inter-reduce tails so the output is canonical
    reduced = []
    for idx, g in enumerate(kept):
        others = [h for j, h in enumerate(kept) if j != idx]
        lead = max(g.terms)
        tail = {m: c for m, c in g.terms.items() if m != lead}
        if others:
            r, _ = _reduce_dict(tail, others, s, reg)
        else:
            r = tail
        r[lead] = g.terms[lead]
        reduced.append(Polynomial._raw(reg, r))
    reduced.sort(key=lambda p: max(p.terms), reverse=True)
    hyp = all(
        all(m[:s] != max(g.terms)[:s] for m in g.terms if m != max(g.terms)) for g in reduced
    )
    homog = all(g.is_homogeneous() for g in reduced)
    return GroebnerModuleBasis(n, k, tuple(reduced), reg, homogeneous=homog, minimal=True, division_hypothesis=hyp)


def s_pairs_reduce_to_zero(basis: GroebnerModuleBasis) -> bool:
    """Buchberger criterion at module level (used as a certificate)."""
    s = basis.split
    G = list(basis.generators)
    for i in range(len(G)):
        for j in range(i + 1, len(G)):
            if max(G[i].terms)[:s] != max(G[j].terms)[:s]:
                continue
            r, _ = _reduce_dict(_spoly(G[i], G[j], s).terms, G, s, basis.registry)
            if r:
                return False
    return True


def divide(F: Polynomial, basis: GroebnerModuleBasis):
    """Return ``(g, remainder)`` with ``F = sum g_j P_j + remainder`` exactly."""
    if F.registry != basis.registry:
        try:
            F = F.embed(basis.registry)
        except PolynomialError as exc:
            from .exact_poly import RegistryMismatchError

            raise RegistryMismatchError(F.registry, basis.registry, "divide") from exc
    r, q = _reduce_dict(F.terms, list(basis.generators), basis.split, basis.registry)
    g = [Polynomial._raw(basis.registry, {m: c for m, c in qd.items() if c != 0}) for qd in q]
    return g, Polynomial._raw(basis.registry, r)


@lru_cache(maxsize=64)
def _groebner_for(generators: tuple, n: int, k: int):
    return build_groebner(list(generators), n, k)


def decompose_in_m2k(F: Polynomial, n: int, k: int, basis: MinorBasis | None = None):
    """Coefficients ``g_j(z)`` with ``F = sum g_j Q_j`` for the basis ``Q_j`` of M²_k."""
    basis = basis or squared_minor_basis(n, k)
    gb = _groebner_for(tuple(basis.generators), n, k)
    F = _as_module_poly(F, n, k)
    g, rem = divide(F, gb)
    if not rem.is_zero():
        raise NotInModuleError(rem)
    reg = gb.registry
    Q = [_as_module_poly(q, n, k) for q in basis.generators]
    out = [Polynomial.zero(reg) for _ in Q]
    for gi, Gi in zip(g, gb.generators):
        if gi.is_zero():
            continue
        T = span_coordinates(Gi, Q)
        if T is None:  # pragma: no cover - Gröbner elements are z-free combinations
            raise PolynomialError("Gröbner element outside the span of the chosen basis")
        for j, t in enumerate(T):
            if t != 0:
                out[j] = out[j] + gi.scale(t)
    check = Polynomial.zero(reg)
    for gj, qj in zip(out, Q):
        check = check + gj * qj
    if check != F:  # pragma: no cover - guarded invariant
        raise PolynomialError("re-expansion failed after change of basis")
    return out


def column_degrees(F: Polynomial, n: int, k: int):
    """Set of per-column degree vectors over the first k columns."""
    s = n * k
    return {tuple(sum(m[j * n:(j + 1) * n]) for j in range(k)) for m in F.terms if s}


@lru_cache(maxsize=16)
def _restriction_registry(n: int, k: int):
    names = [f"c_{a}_{j}" for j in range(1, k + 1) for a in range(1, k + 1)]
    names += [f"z_{i}" for i in range(1, n + 1)]
    return VariableRegistry(names)


@lru_cache(maxsize=16)
def _det_c_squared(n: int, k: int):
    reg = _restriction_registry(n, k)
    C = [[Polynomial.var(reg, f"c_{a}_{j}") for j in range(1, k + 1)] for a in range(1, k + 1)]
    d = symbolic_det(C)
    return d * d


def sample_frame(rng: random.Random, n: int, k: int, max_retries: int = 100):
    for _ in range(max_retries):
        B = [[rng.randint(-5, 5) for _ in range(k)] for _ in range(n)]
        if rank([[Fraction(v) for v in row] for row in B]) == k:
            return B
    raise DegenerateSubspaceError(f"no rank-{k} frame after {max_retries} draws")


def restrict_to_frame(F: Polynomial, B, n: int, k: int) -> Polynomial:
    """Substitute ``w_j = B c_j`` (column j of the first k) keeping the z variables."""
    reg = _restriction_registry(n, k)
    mapping = {}
    for j in range(1, k + 1):
        for i in range(1, n + 1):
            form = Polynomial.zero(reg)
            for a in range(1, k + 1):
                if B[i - 1][a - 1]:
                    form = form + Polynomial.var(reg, f"c_{a}_{j}").scale(B[i - 1][a - 1])
            mapping[f"w_{i}_{j}"] = form
    return F.substitute_linear(mapping, reg)


def membership_by_restriction(F: Polynomial, n: int, k: int, trials: int = 3, seed: int = 0, max_retries: int = 100) -> bool:
    """Test ``F in Poly(z) M²_k`` by restricting the first k columns to random k-planes."""
    F = _as_module_poly(F, n, k)
    if F.is_zero() or k == 0:
        return True
    if len(column_degrees(F, n, k)) != 1:
        raise NonHomogeneousError("F must be homogeneous in each of the first k columns")
    rng = random.Random(seed)
    D = _det_c_squared(n, k)
    reg = D.registry
    s = k * k
    m0 = max(D.terms)
    d0 = D.terms[m0]
    for _ in range(trials):
        B = sample_frame(rng, n, k, max_retries)
        R = restrict_to_frame(F, B, n, k)
        G = {m: c / d0 for m, c in R.terms.items() if m[:s] == m0[:s]}
        G = {(0,) * s + m[s:]: c for m, c in G.items()}
        if D * Polynomial._raw(reg, G) != R:
            return False
    return True
