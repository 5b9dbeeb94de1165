"""Finite convex functions: max-affine, convex quadratics, support functions, combinations."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .convex_geometry import Polytope, convex_hull, hull_data, support_eval
from .linalg import linprog, linprog_std


class ConvexFunctionError(ValueError):
    pass


def _fvec(v):
    return tuple(Fraction(x) for x in v)


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


@dataclass(frozen=True)
class AffineMap:
    """x -> <y, x> + c."""

    y: tuple
    c: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "y", _fvec(self.y))
        object.__setattr__(self, "c", Fraction(self.c))

    @property
    def n(self):
        return len(self.y)

    def __call__(self, x):
        return _dot(self.y, x) + self.c


# ---------------------------------------------------------------------------
# variants


@dataclass(frozen=True)
class MaxAffine:
    """max_i <a_i, x> + b_i."""

    pieces: tuple

    def __post_init__(self):
        pcs = tuple((_fvec(a), Fraction(b)) for a, b in self.pieces)
        if not pcs:
            raise ConvexFunctionError("MaxAffine needs at least one piece")
        if len({len(a) for a, _ in pcs}) != 1:
            raise ConvexFunctionError("pieces of mixed dimension")
        object.__setattr__(self, "pieces", pcs)

    @property
    def n(self):
        return len(self.pieces[0][0])

    def canonical(self) -> "MaxAffine":
        return MaxAffine(essential_pieces(self.pieces))

    def __call__(self, x):
        return evaluate(self, x)


def ldl_psd(A) -> bool:
    """Exact PSD test via symmetric pivoted LDL^T."""
    M = [[Fraction(v) for v in row] for row in A]
    n = len(M)
    active = list(range(n))
    while active:
        piv = max(active, key=lambda i: (M[i][i], -i))
        d = M[piv][piv]
        if d < 0:
            return False
        if d == 0:
            # a zero pivot forces the whole remaining row/column to vanish
            return all(M[i][j] == 0 for i in active for j in active)
        active.remove(piv)
        for i in active:
            f = M[i][piv] / d
            if f:
                for j in active:
                    M[i][j] -= f * M[piv][j]
    return True


@dataclass(frozen=True)
class Quadratic:
    """<x, A x> + <l, x> + c with A symmetric positive semidefinite."""

    A: tuple
    l: tuple
    c: Fraction = Fraction(0)

    def __post_init__(self):
        A = tuple(_fvec(r) for r in self.A)
        n = len(A)
        if any(len(r) != n for r in A):
            raise ConvexFunctionError("A must be square")
        if any(A[i][j] != A[j][i] for i in range(n) for j in range(n)):
            raise ConvexFunctionError("A must be symmetric")
        if not ldl_psd(A):
            raise ConvexFunctionError("A is not positive semidefinite")
        object.__setattr__(self, "A", A)
        l = _fvec(self.l) if self.l is not None else (Fraction(0),) * n
        if len(l) != n:
            raise ConvexFunctionError("l has the wrong length")
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "c", Fraction(self.c))

    @property
    def n(self):
        return len(self.A)

    def gradient(self, x):
        return tuple(2 * _dot(self.A[i], x) + self.l[i] for i in range(self.n))

    def hessian(self):
        return tuple(tuple(2 * v for v in row) for row in self.A)

    def __call__(self, x):
        return evaluate(self, x)


@dataclass(frozen=True)
class SupportFn:
    """x -> h_P(x - x0)."""

    P: Polytope
    shift: tuple = None

    def __post_init__(self):
        sh = _fvec(self.shift) if self.shift is not None else (Fraction(0),) * self.P.n
        if len(sh) != self.P.n:
            raise ConvexFunctionError("shift has the wrong length")
        object.__setattr__(self, "shift", sh)

    @property
    def n(self):
        return self.P.n

    def to_max_affine(self) -> MaxAffine:
        return MaxAffine(tuple((v, -_dot(v, self.shift)) for v in self.P.vertices))

    def __call__(self, x):
        return evaluate(self, x)


@dataclass(frozen=True)
class Combo:
    """sum_i w_i f_i + offset, with w_i >= 0."""

    terms: tuple
    offset: AffineMap

    def __post_init__(self):
        terms = tuple((Fraction(w), f) for w, f in self.terms)
        if any(w < 0 for w, _ in terms):
            raise ConvexFunctionError("Combo weights must be nonnegative")
        dims = {f.n for _, f in terms} | {self.offset.n}
        if len(dims) != 1:
            raise ConvexFunctionError("Combo members of mixed dimension")
        object.__setattr__(self, "terms", terms)

    @property
    def n(self):
        return self.offset.n

    def __call__(self, x):
        return evaluate(self, x)


ConvexFunction = (MaxAffine, Quadratic, SupportFn, Combo)


# ---------------------------------------------------------------------------
# evaluation and conversions


def evaluate(f, x):
    x = _fvec(x)
    if len(x) != f.n:
        raise ConvexFunctionError(f"point of dimension {len(x)} for a function on R^{f.n}")
    if isinstance(f, MaxAffine):
        return max(_dot(a, x) + b for a, b in f.pieces)
    if isinstance(f, Quadratic):
        return sum(x[i] * _dot(f.A[i], x) for i in range(f.n)) + _dot(f.l, x) + f.c
    if isinstance(f, SupportFn):
        return support_eval(f.P, tuple(a - b for a, b in zip(x, f.shift)))
    if isinstance(f, Combo):
        return sum(w * evaluate(g, x) for w, g in f.terms) + f.offset(x)
    raise ConvexFunctionError(f"unknown function type {type(f).__name__}")


def is_polyhedral(f) -> bool:
    if isinstance(f, (MaxAffine, SupportFn)):
        return True
    if isinstance(f, Combo):
        return all(is_polyhedral(g) for _, g in f.terms)
    return False


def is_quadratic(f) -> bool:
    if isinstance(f, Quadratic):
        return True
    if isinstance(f, Combo):
        return all(is_quadratic(g) for _, g in f.terms)
    return False


def as_max_affine(f) -> MaxAffine:
    """Exact max-affine form of a polyhedral function (redundant pieces removed)."""
    if isinstance(f, MaxAffine):
        return f.canonical()
    if isinstance(f, SupportFn):
        return f.to_max_affine().canonical()
    if isinstance(f, Combo):
        acc = [(tuple(f.offset.y), f.offset.c)]
        for w, g in f.terms:
            if w == 0:
                continue
            gp = as_max_affine(g).pieces
            acc = essential_pieces([
                (tuple(a + w * c for a, c in zip(a0, a1)), b0 + w * b1) for (a0, b0), (a1, b1) in product(acc, gp)
            ])
        return MaxAffine(essential_pieces(acc))
    raise ConvexFunctionError(f"{type(f).__name__} is not polyhedral")


def as_quadratic(f) -> Quadratic:
    if isinstance(f, Quadratic):
        return f
    if isinstance(f, Combo):
        n = f.n
        A = [[Fraction(0)] * n for _ in range(n)]
        l = list(f.offset.y)
        c = f.offset.c
        for w, g in f.terms:
            q = as_quadratic(g)
            for i in range(n):
                l[i] += w * q.l[i]
                for j in range(n):
                    A[i][j] += w * q.A[i][j]
            c += w * q.c
        return Quadratic(A, l, c)
    raise ConvexFunctionError(f"{type(f).__name__} is not quadratic")


def essential_pieces(pieces):
    """Pieces that are strictly maximal somewhere, lexicographically sorted.

    Lift each piece to ``(a, -b)``; essential pieces are the vertices of the
    lower hull, i.e. the extreme points of the hull after adding a copy of
    every lifted point pushed above all of them.
    """
    uniq = {}
    for a, b in pieces:
        a, b = _fvec(a), Fraction(b)
        if a not in uniq or b > uniq[a]:
            uniq[a] = b
    if len(uniq) == 1:
        return tuple(uniq.items())
    top = max(-b for b in uniq.values()) + 1
    lifted = [a + (-b,) for a, b in uniq.items()]
    cover = [a + (top,) for a in uniq]
    hd = hull_data(lifted + cover)
    ext = {hd.points[i] for i in hd.vertices}
    keep = [(a, b) for a, b in uniq.items() if a + (-b,) in ext]
    return tuple(sorted(keep))


# ---------------------------------------------------------------------------
# lattice operations


def _require_max_affine(*fs):
    for f in fs:
        if not isinstance(f, MaxAffine):
            raise ConvexFunctionError(f"expected MaxAffine, got {type(f).__name__}")
    if len({f.n for f in fs}) != 1:
        raise ConvexFunctionError("dimension mismatch")


def pointwise_max(f: MaxAffine, h: MaxAffine) -> MaxAffine:
    _require_max_affine(f, h)
    return MaxAffine(essential_pieces(f.pieces + h.pieces))


def dominated_by(piece, f: MaxAffine) -> bool:
    """Is the affine ``piece`` <= f everywhere?  (LP over convex weights.)"""
    a, b = piece
    m = len(f.pieces)
    A_eq = [[Fraction(1)] * m]
    b_eq = [Fraction(1)]
    for i in range(len(a)):
        A_eq.append([p[0][i] for p in f.pieces])
        b_eq.append(a[i])
    status, val, _ = linprog_std([p[1] for p in f.pieces], A_eq, b_eq)
    return status == "optimal" and val >= b


def _strictly_above(p1, p2, S) -> bool:
    """Is there x with p1(x) > q(x) and p2(x) > q(x) for every q in S?"""
    n = len(p1[0])
    rows, rhs = [], []
    for p in (p1, p2):
        for q in S:
            # q(x) - p(x) + t <= 0
            rows.append([qa - pa for qa, pa in zip(q[0], p[0])] + [Fraction(1)])
            rhs.append(p[1] - q[1])
    rows.append([Fraction(0)] * n + [Fraction(1)])
    rhs.append(Fraction(1))
    status, val, _ = linprog([Fraction(0)] * n + [Fraction(1)], rows, rhs)
    return status == "optimal" and val > 0


def min_if_convex(f: MaxAffine, h: MaxAffine):
    """The pointwise minimum as a MaxAffine when it is convex, else ``None``.

    If min(f, h) is convex it is the max of those pieces of f and h lying
    below both functions.  We build that candidate g and certify
    ``g == min(f, h)`` by checking with exact LPs that no point has both
    ``f > g`` and ``h > g``.
    """
    _require_max_affine(f, h)
    f, h = f.canonical(), h.canonical()
    S = [p for p in f.pieces if dominated_by(p, h)] + [p for p in h.pieces if dominated_by(p, f)]
    if not S:
        return None
    S = list(essential_pieces(S))
    Sset = set(S)
    fa = [p for p in f.pieces if p not in Sset]
    ha = [p for p in h.pieces if p not in Sset]
    for p1 in fa:
        for p2 in ha:
            if _strictly_above(p1, p2, S):
                return None
    return MaxAffine(tuple(S))


def active_pieces(f: MaxAffine, x):
    x = _fvec(x)
    vals = [_dot(a, x) + b for a, b in f.pieces]
    top = max(vals)
    return [f.pieces[i] for i, v in enumerate(vals) if v == top]


def subdifferential(f, x) -> Polytope:
    if not isinstance(f, MaxAffine):
        f = as_max_affine(f)
    return convex_hull([a for a, _ in active_pieces(f, x)])


def add_affine(f, ell: AffineMap):
    if ell.n != f.n:
        raise ConvexFunctionError("dimension mismatch in add_affine")
    if isinstance(f, MaxAffine):
        return MaxAffine(tuple((tuple(x + y for x, y in zip(a, ell.y)), b + ell.c) for a, b in f.pieces))
    if isinstance(f, Quadratic):
        return Quadratic(f.A, tuple(x + y for x, y in zip(f.l, ell.y)), f.c + ell.c)
    if isinstance(f, Combo):
        return Combo(f.terms, AffineMap(tuple(x + y for x, y in zip(f.offset.y, ell.y)), f.offset.c + ell.c))
    if isinstance(f, SupportFn):
        return Combo(((Fraction(1), f),), ell)
    raise ConvexFunctionError(f"unknown function type {type(f).__name__}")


def scale(f, t):
    t = Fraction(t)
    if t < 0:
        raise ConvexFunctionError("scale needs t >= 0")
    if isinstance(f, MaxAffine):
        return MaxAffine(tuple((tuple(t * x for x in a), t * b) for a, b in f.pieces))
    if isinstance(f, Quadratic):
        return Quadratic(tuple(tuple(t * v for v in r) for r in f.A), tuple(t * v for v in f.l), t * f.c)
    if isinstance(f, SupportFn):
        return SupportFn(f.P.dilate(t), f.shift)
    if isinstance(f, Combo):
        return Combo(tuple((t * w, g) for w, g in f.terms), AffineMap(tuple(t * v for v in f.offset.y), t * f.offset.c))
    raise ConvexFunctionError(f"unknown function type {type(f).__name__}")


def combine(*terms, offset=None):
    """Nonnegative combination helper: ``combine((w1, f1), (w2, f2), offset=ell)``."""
    n = terms[0][1].n
    return Combo(tuple(terms), offset or AffineMap((0,) * n, 0))


def zero_function(n: int) -> MaxAffine:
    return MaxAffine((((Fraction(0),) * n, Fraction(0)),))


def abs_sum(n: int) -> MaxAffine:
    """|x_1| + ... + |x_n| as a MaxAffine."""
    pieces = [(tuple(Fraction(s) for s in signs), Fraction(0)) for signs in product((1, -1), repeat=n)]
    return MaxAffine(tuple(pieces))


# ---------------------------------------------------------------------------
# random generators (deterministic from an rng)


def random_max_affine(rng: random.Random, n: int, pieces: int, lo: int = -3, hi: int = 3) -> MaxAffine:
    return MaxAffine(tuple(
        (tuple(rng.randint(lo, hi) for _ in range(n)), rng.randint(lo, hi)) for _ in range(pieces)
    ))


def valuation_pair(rng: random.Random, n: int, max_pieces: int = 6, max_tries: int = 500):
    """Rejection-sample (f, h, f v h, f ^ h) with convex minimum."""
    for _ in range(max_tries):
        m = rng.randint(2, max_pieces)
        phi = random_max_affine(rng, n, m)
        pcs = list(phi.pieces)
        labels = [rng.randrange(3) for _ in pcs]  # 0: f only, 1: h only, 2: shared
        if 2 not in labels:
            labels[rng.randrange(m)] = 2
        f = MaxAffine(tuple(p for p, t in zip(pcs, labels) if t != 1))
        h = MaxAffine(tuple(p for p, t in zip(pcs, labels) if t != 0))
        g = min_if_convex(f, h)
        if g is not None:
            return f, h, pointwise_max(f, h), g
    raise ConvexFunctionError("no valuation pair accepted")


def random_psd(rng: random.Random, n: int, lo: int = -3, hi: int = 3):
    """A^T A / 2 + I/2 style integer-derived PSD matrix (exact)."""
    B = [[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)]
    return tuple(tuple(Fraction(sum(B[k][i] * B[k][j] for k in range(n)), 2) + (Fraction(1, 2) if i == j else 0) for j in range(n)) for i in range(n))


def to_json(f):
    from .serialize import rat

    if isinstance(f, MaxAffine):
        return {"type": "max_affine", "pieces": [{"a": [rat(v) for v in a], "b": rat(b)} for a, b in f.pieces]}
    if isinstance(f, Quadratic):
        return {"type": "quadratic", "A": [[rat(v) for v in r] for r in f.A], "l": [rat(v) for v in f.l], "c": rat(f.c)}
    if isinstance(f, SupportFn):
        return {"type": "support", "vertices": [[rat(v) for v in p] for p in f.P.vertices], "shift": [rat(v) for v in f.shift]}
    if isinstance(f, Combo):
        return {"type": "combo", "terms": [{"w": rat(w), "f": to_json(g)} for w, g in f.terms],
                "offset": {"y": [rat(v) for v in f.offset.y], "c": rat(f.offset.c)}}
    raise ConvexFunctionError(f"unknown function type {type(f).__name__}")


def from_json(obj):
    from .serialize import parse_rat

    t = obj.get("type")
    if t == "max_affine":
        return MaxAffine(tuple((tuple(parse_rat(v) for v in p["a"]), parse_rat(p["b"])) for p in obj["pieces"]))
    if t == "quadratic":
        A = [[parse_rat(v) for v in r] for r in obj["A"]]
        l = [parse_rat(v) for v in obj.get("l", ["0"] * len(A))]
        return Quadratic(A, l, parse_rat(obj.get("c", "0")))
    if t == "support":
        P = convex_hull([tuple(parse_rat(v) for v in p) for p in obj["vertices"]])
        sh = obj.get("shift")
        return SupportFn(P, tuple(parse_rat(v) for v in sh) if sh is not None else None)
    if t == "combo":
        off = obj.get("offset", {})
        terms = tuple((parse_rat(x["w"]), from_json(x["f"])) for x in obj["terms"])
        n = terms[0][1].n
        return Combo(terms, AffineMap(tuple(parse_rat(v) for v in off.get("y", ["0"] * n)), parse_rat(off.get("c", "0"))))
    raise ConvexFunctionError(f"unknown function type {t!r}")
