"""Independent reference computations built on sympy and scipy only."""

from itertools import combinations, combinations_with_replacement

import sympy


def sympy_n_nk(n, k):
    """dim span{Delta_I Delta_J} via sympy minors and a sympy rank over all monomials."""
    W = sympy.Matrix(n, k, lambda i, j: sympy.Symbol(f"w{i}{j}"))
    syms = list(W)
    if k == 0:
        return 1
    minors = [W.extract(list(rows), list(range(k))).det() for rows in combinations(range(n), k)]
    prods = [sympy.Poly(sympy.expand(a * b), *syms) for a, b in combinations_with_replacement(minors, 2)]
    monos = sorted({m for p in prods for m in p.as_dict()})
    M = sympy.Matrix([[p.as_dict().get(m, 0) for m in monos] for p in prods])
    return M.rank()


def sympy_hessian_dim(n):
    S = sympy.Matrix(n, n, lambda i, j: sympy.Symbol(f"s{min(i, j)}{max(i, j)}"))
    syms = sorted(S.free_symbols, key=str)
    polys = [sympy.Integer(1)]
    for k in range(1, n + 1):
        for rows in combinations(range(n), k):
            for cols in combinations(range(n), k):
                polys.append(S.extract(list(rows), list(cols)).det())
    polys = [sympy.Poly(sympy.expand(p), *syms) for p in polys]
    monos = sorted({m for p in polys for m in p.as_dict()})
    return sympy.Matrix([[p.as_dict().get(m, 0) for m in monos] for p in polys]).rank()


def sympy_member_of_m2k(F, basis):
    """F in Poly(z) M2_k iff each z-coefficient lies in span(basis): sympy rank test."""
    s = basis.n * basis.k
    groups = {}
    for m, c in F.terms.items():
        groups.setdefault(m[s:], {})[m[:s]] = c
    gens = [{m[:s]: c for m, c in g.embed(F.registry).terms.items()} for g in basis.generators]
    for part in groups.values():
        monos = sorted(set(part) | {m for g in gens for m in g})
        A = sympy.Matrix([[sympy.Rational(g.get(m, 0)) for m in monos] for g in gens])
        Ab = A.col_join(sympy.Matrix([[sympy.Rational(part.get(m, 0)) for m in monos]]))
        if Ab.rank() != A.rank():
            return False
    return True


def sympy_reachable(basis_texts, n, target):
    """Can Σ c_i Psi_P(q_i), over convex quadratics q_i, have density δ_{j,target} for every basis P_j?

    Densities are polynomials in x with coefficients polynomial in the quadratic's
    parameters; the realisable coefficient vectors span the column space of the
    parameter-monomial matrix (convex parameters are Zariski dense).
    """
    xs = sympy.symbols(f"x1:{n + 1}")
    A = sympy.Matrix(n, n, lambda i, j: sympy.Symbol(f"a{min(i, j)}{max(i, j)}"))
    l = sympy.Matrix(sympy.symbols(f"l1:{n + 1}"))
    c0 = sympy.Symbol("c0")
    X = sympy.Matrix(xs)
    q = (X.T * A * X)[0] + (l.T * X)[0] + c0
    subs = {"c": q}
    for i in range(n):
        subs[f"y_{i + 1}"] = sympy.diff(q, xs[i])
        for j in range(i, n):
            subs[f"s_{i + 1}_{j + 1}"] = sympy.diff(q, xs[i], xs[j])
    params = sorted(A.free_symbols | set(l) | {c0}, key=str)
    rows, cols = {}, {}
    for k, text in enumerate(basis_texts):
        expr = sympy.expand(sympy.sympify(text.replace("^", "**"), locals={nm: sympy.Symbol(nm) for nm in subs}).subs(
            {sympy.Symbol(nm): v for nm, v in subs.items()}, simultaneous=True))
        poly = sympy.Poly(expr, *xs, *params)
        for m, c in poly.as_dict().items():
            xm, pm = m[:n], m[n:]
            rows[(k, xm)] = True
            cols.setdefault(pm, {})[(k, xm)] = c
    zero = (0,) * n
    for k in range(len(basis_texts)):
        rows[(k, zero)] = True
    rlist = sorted(rows)
    M = sympy.Matrix([[cols[pm].get(r, 0) for pm in sorted(cols)] for r in rlist])
    b = sympy.Matrix([[1 if r == (target, zero) else 0] for r in rlist])
    return M.rank() == M.row_join(b).rank()
