"""Exact linear algebra over Q and Q[i]: elimination, solves, small LPs.

Everything here works on plain lists of exact scalars (``int``, ``Fraction``
or :class:`~maval.exact_poly.Gaussian`).
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations

from .exact_poly import Polynomial, PolynomialError


class LinearAlgebraError(ValueError):
    pass


def rref(rows, ncols=None):
    """Reduced row echelon form. Returns ``(rows, pivot_columns)``.

    Pivot search scans columns left to right and takes the first row (in
    input order) with a nonzero entry, so results are deterministic.
    """
    M = [list(r) for r in rows]
    if not M:
        return [], []
    ncols = len(M[0]) if ncols is None else ncols
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = Fraction(1) / M[r][c] if not hasattr(M[r][c], "im") else 1 / M[r][c]
        M[r] = [v * inv for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                Mi, Mr = M[i], M[r]
                M[i] = [a - f * b for a, b in zip(Mi, Mr)]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M[:r], pivots


def rank(rows) -> int:
    rows = [r for r in rows if any(v != 0 for v in r)]
    if not rows:
        return 0
    return len(rref(rows)[1])


def solve(A, b):
    """One exact solution of ``A x = b`` (free variables set to 0), or ``None``."""
    if not A:
        return [] if all(v == 0 for v in b) else None
    n = len(A[0])
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, piv = rref(aug, n + 1)
    if piv and piv[-1] == n:
        return None
    x = [Fraction(0)] * n
    for row, c in zip(R, piv):
        x[c] = row[n]
    return x


def solve_many(A, B):
    """Solve ``A X = B`` for all columns of ``B`` with one elimination; ``None`` if inconsistent."""
    if not A:
        return None
    n = len(A[0])
    m = len(B[0]) if B else 0
    full, r = _rref_all([list(row) + list(brow) for row, brow in zip(A, B)], n)
    if any(v != 0 for row in full[r:] for v in row[n:]):
        return None
    X = [[Fraction(0)] * m for _ in range(n)]
    for row in full[:r]:
        c = next(j for j in range(n) if row[j] != 0)
        X[c] = list(row[n:])
    return X


def solve_columns(A, B):
    """Like :func:`solve_many` but per column: a list of solutions, ``None`` where inconsistent."""
    n = len(A[0])
    m = len(B[0]) if B else 0
    full, r = _rref_all([list(row) + list(brow) for row, brow in zip(A, B)], n)
    out = []
    for j in range(m):
        if any(row[n + j] != 0 for row in full[r:]):
            out.append(None)
            continue
        x = [Fraction(0)] * n
        for row in full[:r]:
            c = next(i for i in range(n) if row[i] != 0)
            x[c] = row[n + j]
        out.append(x)
    return out


def _rref_all(rows, ncols):
    """Like :func:`rref` on the first ``ncols`` columns but keeps zero rows."""
    M = [list(r) for r in rows]
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c] if hasattr(M[r][c], "im") else Fraction(1) / M[r][c]
        M[r] = [v * inv for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        r += 1
    return M, r


def det(M):
    """Exact determinant by fraction-free elimination."""
    n = len(M)
    if n == 0:
        return Fraction(1)
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    if n == 3:
        a, b, c = M[0]
        d, e, f = M[1]
        g, h, i = M[2]
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    A = [list(r) for r in M]
    sign = 1
    for k in range(n):
        piv = next((i for i in range(k, n) if A[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            A[k], A[piv] = A[piv], A[k]
            sign = -sign
        for i in range(k + 1, n):
            f = Fraction(A[i][k]) / A[k][k] if not hasattr(A[k][k], "im") else A[i][k] / A[k][k]
            if f != 0:
                A[i] = [a - f * b for a, b in zip(A[i], A[k])]
    out = Fraction(sign)
    for k in range(n):
        out = out * A[k][k]
    return out


def int_det(M):
    """Determinant of an integer matrix (Bareiss, stays in ``int``)."""
    n = len(M)
    if n == 0:
        return 1
    if n <= 3:
        return det(M)
    A = [list(r) for r in M]
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if sw is None:
                return 0
            A[k], A[sw] = A[sw], A[k]
            sign = -sign
        akk = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            row_i, row_k = A[i], A[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * A[n - 1][n - 1]


def symbolic_det(M):
    """Determinant of a square matrix of polynomials by permutation expansion."""
    n = len(M)
    if n == 0:
        raise LinearAlgebraError("symbolic_det needs a registry for the empty matrix")
    reg = M[0][0].registry
    total = Polynomial.zero(reg)
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = Polynomial.one(reg)
        for i, j in enumerate(perm):
            term = term * M[i][j]
            if term.is_zero():
                break
        total = total + (term if inv % 2 == 0 else -term)
    return total


def vandermonde_inverse(nodes):
    """Exact inverse ``C`` of ``V[j][i] = nodes[j]**i``: coefficients ``a = C @ values``."""
    nodes = [Fraction(x) for x in nodes]
    m = len(nodes)
    V = [[x**i for i in range(m)] for x in nodes]
    ident = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    X = solve_many(V, ident)
    if X is None:
        raise LinearAlgebraError("repeated Vandermonde nodes")
    return X


def coefficient_matrix(polys, monomials=None):
    """Rows of coefficients of ``polys`` against a shared monomial list (lex descending)."""
    if monomials is None:
        mons = set()
        for p in polys:
            mons.update(p.terms)
        monomials = sorted(mons, reverse=True)
    col = {m: i for i, m in enumerate(monomials)}
    rows = []
    for p in polys:
        row = [Fraction(0)] * len(monomials)
        for m, c in p.terms.items():
            if m not in col:
                raise LinearAlgebraError("polynomial has a monomial outside the given list")
            row[col[m]] = c
        rows.append(row)
    return rows, list(monomials)


def span_coordinates(target, basis):
    """Exact coordinates of ``target`` in the span of ``basis`` polynomials, or ``None``."""
    if target.is_zero():
        return [Fraction(0)] * len(basis)
    for b in basis:
        if b.registry != target.registry:
            raise PolynomialError("span_coordinates: registry mismatch")
    mons = set(target.terms)
    for b in basis:
        mons.update(b.terms)
    monomials = sorted(mons, reverse=True)
    rows, _ = coefficient_matrix(basis, monomials)
    trow, _ = coefficient_matrix([target], monomials)
    A = [[rows[j][i] for j in range(len(basis))] for i in range(len(monomials))]
    return solve(A, trow[0])


# ---------------------------------------------------------------------------
# exact simplex (Bland's rule), used for small dominance / feasibility checks


def _pivot(T, obj, r, c):
    inv = Fraction(1) / T[r][c]
    T[r] = [v * inv for v in T[r]]
    rowr = T[r]
    for i in range(len(T)):
        if i != r:
            f = T[i][c]
            if f != 0:
                T[i] = [a - f * b for a, b in zip(T[i], rowr)]
    f = obj[c]
    if f != 0:
        obj[:] = [a - f * b for a, b in zip(obj, rowr)]


def _simplex(T, obj, basis, allowed):
    """Maximise; ``obj`` holds reduced costs and ``-value`` in the last slot."""
    ncol = len(obj) - 1
    while True:
        enter = next((j for j in range(ncol) if allowed[j] and obj[j] > 0), None)
        if enter is None:
            return "optimal"
        best, leave = None, None
        for i, row in enumerate(T):
            a = row[enter]
            if a > 0:
                ratio = row[-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            return "unbounded"
        _pivot(T, obj, leave, enter)
        basis[leave] = enter


def linprog_std(c, A, b):
    """Maximise ``c.x`` subject to ``A x = b``, ``x >= 0`` (exact).

    Returns ``(status, value, x)`` with status in {"optimal", "infeasible", "unbounded"}.
    """
    m = len(A)
    n = len(c)
    A = [[Fraction(v) for v in row] for row in A]
    b = [Fraction(v) for v in b]
    for i in range(m):
        if b[i] < 0:
            A[i] = [-v for v in A[i]]
            b[i] = -b[i]
    # phase 1 with one artificial per row
    T = [A[i] + [Fraction(int(i == j)) for j in range(m)] + [b[i]] for i in range(m)]
    basis = [n + i for i in range(m)]
    obj = [Fraction(0)] * (n + m + 1)
    for i in range(m):
        obj = [o + t for o, t in zip(obj, T[i])]
    for i in range(m):
        obj[n + i] = Fraction(0)
    allowed = [True] * (n + m)
    _simplex(T, obj, basis, allowed)
    if obj[-1] != 0:
        # phase-1 optimum is -sum(artificials); nonzero means infeasible
        return "infeasible", None, None
    # drive artificials out of the basis
    keep = []
    for i in range(m):
        if basis[i] >= n:
            col = next((j for j in range(n) if T[i][j] != 0), None)
            if col is None:
                continue  # redundant row
            _pivot(T, obj, i, col)
            basis[i] = col
        keep.append(i)
    T = [T[i][:n] + [T[i][-1]] for i in keep]
    basis = [basis[i] for i in keep]
    obj = [Fraction(v) for v in c] + [Fraction(0)]
    for i, bv in enumerate(basis):
        cb = obj[bv]
        if cb != 0:
            obj = [o - cb * t for o, t in zip(obj, T[i])]
    status = _simplex(T, obj, basis, [True] * n)
    if status == "unbounded":
        return "unbounded", None, None
    x = [Fraction(0)] * n
    for i, bv in enumerate(basis):
        x[bv] = T[i][-1]
    return "optimal", -obj[-1], x


def linprog(c, A_ub=(), b_ub=(), A_eq=(), b_eq=()):
    """Maximise ``c.x`` over free ``x`` with ``A_ub x <= b_ub`` and ``A_eq x = b_eq``."""
    n = len(c)
    mu, me = len(A_ub), len(A_eq)
    # x = xp - xm, slacks s >= 0
    cs = list(c) + [-v for v in c] + [0] * mu
    rows, rhs = [], []
    for i, row in enumerate(A_ub):
        rows.append(list(row) + [-v for v in row] + [int(i == j) for j in range(mu)])
        rhs.append(b_ub[i])
    for i, row in enumerate(A_eq):
        rows.append(list(row) + [-v for v in row] + [0] * mu)
        rhs.append(b_eq[i])
    if not rows:
        return ("optimal", Fraction(0), [Fraction(0)] * n) if all(v == 0 for v in c) else ("unbounded", None, None)
    status, val, x = linprog_std(cs, rows, rhs)
    if status != "optimal":
        return status, None, None
    return status, val, [x[i] - x[n + i] for i in range(n)]
