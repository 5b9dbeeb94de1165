"""Exact polytope kernel: hulls, volumes, Minkowski sums, mixed volumes.

Hulls are computed on integer-scaled coordinates.  Points are first projected
isomorphically onto their affine hull (dimension r <= 4), then an incremental
beneath-beyond hull with simplicial facets is built there.  A point is a
vertex iff the normals of its incident facets span R^r.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from itertools import combinations
from math import factorial, gcd, lcm

from .linalg import int_det, rank



class GeometryError(ValueError):
    pass


def _frac_point(p):
    return tuple(Fraction(x) for x in p)


# ---------------------------------------------------------------------------
# hull machinery


@dataclass
class HullData:
    """Combinatorial hull of a point list (indices refer to the deduplicated input)."""

    points: list  # deduplicated Fraction points
    dim: int  # affine dimension
    coords: tuple  # projection coordinates (len == dim)
    scale: int  # common denominator used for integer coordinates
    int_points: list  # projected integer points
    vertices: list  # indices of extreme points
    facets: list = field(default_factory=list)  # (normal, offset, index tuple), projected coords

    def facet_planes(self):
        """Distinct facet hyperplanes as primitive ``(normal, offset)`` pairs."""
        planes = {}
        for nrm, off, idx in self.facets:
            g = reduce(gcd, [abs(v) for v in nrm] + [abs(off)])
            key = (tuple(v // g for v in nrm), off // g)
            planes.setdefault(key, set()).update(idx)
        return planes


def _normal(pts):
    """Integer normal of the hyperplane through r points in Z^r (cofactor vector)."""
    r = len(pts[0])
    base = pts[0]
    M = [[a - b for a, b in zip(p, base)] for p in pts[1:]]
    out = []
    for j in range(r):
        sub = [row[:j] + row[j + 1:] for row in M]
        d = int_det(sub) if sub else 1
        out.append(d if j % 2 == 0 else -d)
    return out


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _affine_frame(ipts):
    """Indices of an affinely independent subset and pivot coordinates."""
    base = ipts[0]
    chosen = [0]
    rows = []  # echelon rows (Fraction) with pivot positions
    pivots = []
    d = len(base)
    for idx in range(1, len(ipts)):
        v = [Fraction(a - b) for a, b in zip(ipts[idx], base)]
        for row, pc in zip(rows, pivots):
            if v[pc] != 0:
                f = v[pc] / row[pc]
                v = [a - f * b for a, b in zip(v, row)]
        pc = next((j for j in range(d) if v[j] != 0), None)
        if pc is None:
            continue
        rows.append(v)
        pivots.append(pc)
        chosen.append(idx)
        if len(chosen) == d + 1:
            break
    return chosen, sorted(pivots)


def hull_data(points) -> HullData:
    pts = []
    seen = set()
    for p in points:
        fp = _frac_point(p)
        if fp not in seen:
            seen.add(fp)
            pts.append(fp)
    if not pts:
        raise GeometryError("convex hull of an empty point set")
    d = len(pts[0])
    if any(len(p) != d for p in pts):
        raise GeometryError("points of mixed dimension")
    L = 1
    for p in pts:
        for x in p:
            L = lcm(L, x.denominator)
    ipts = [tuple(int(x * L) for x in p) for p in pts]
    chosen, coords = _affine_frame(ipts)
    r = len(chosen) - 1
    proj = [tuple(p[c] for c in coords) for p in ipts]
    hd = HullData(pts, r, tuple(coords), L, proj, [])
    if r == 0:
        hd.vertices = [0]
        return hd
    if r == 1:
        vals = [p[0] for p in proj]
        lo = min(range(len(vals)), key=lambda i: vals[i])
        hi = max(range(len(vals)), key=lambda i: vals[i])
        hd.vertices = sorted({lo, hi})
        hd.facets = [((-1,), -vals[lo], (lo,)), ((1,), vals[hi], (hi,))]
        return hd
    _incremental(hd, chosen)
    return hd


def _incremental(hd: HullData, chosen):
    P = hd.int_points
    r = hd.dim
    interior = [sum(P[i][c] for i in chosen) for c in range(r)]
    scale_in = r + 1

    def make(idx):
        nrm = _normal([P[i] for i in idx])
        off = _dot(nrm, P[idx[0]])
        side = _dot(nrm, interior) - scale_in * off
        if side > 0:
            nrm = [-v for v in nrm]
            off = -off
        elif side == 0:  # pragma: no cover - interior point is strictly inside
            raise GeometryError("degenerate facet")
        return (nrm, off, tuple(sorted(idx)))

    facets = {}
    fid = 0
    for sub in combinations(chosen, r):
        facets[fid] = make(list(sub))
        fid += 1
    in_simplex = set(chosen)
    for pi in range(len(P)):
        if pi in in_simplex:
            continue
        p = P[pi]
        visible = [f for f, (nrm, off, _) in facets.items() if _dot(nrm, p) > off]
        if not visible:
            continue
        count = {}
        for f in visible:
            idx = facets[f][2]
            for ridge in combinations(idx, r - 1):
                count[ridge] = count.get(ridge, 0) + 1
        for f in visible:
            del facets[f]
        for ridge, c in count.items():
            if c == 1:
                facets[fid] = make(list(ridge) + [pi])
                fid += 1
    hd.facets = list(facets.values())
    incident = {}
    for nrm, off, idx in hd.facets:
        for i in idx:
            incident.setdefault(i, []).append(nrm)
    verts = []
    for i, normals in incident.items():
        if len(normals) >= r and rank([[Fraction(v) for v in nn] for nn in normals]) == r:
            verts.append(i)
    hd.vertices = sorted(verts)


# ---------------------------------------------------------------------------
# polytope type


@dataclass(frozen=True)
class Polytope:
    """V-polytope with exact rational vertices, lexicographically sorted.

    Build through :func:`convex_hull`; the constructor trusts its input.
    """

    vertices: tuple

    def __post_init__(self):
        if not self.vertices:
            raise GeometryError("a polytope needs at least one vertex")

    @property
    def n(self) -> int:
        return len(self.vertices[0])

    @cached_property
    def _hull(self) -> HullData:
        return hull_data(self.vertices)

    @property
    def affine_dim(self) -> int:
        return self._hull.dim

    @cached_property
    def volume(self) -> Fraction:
        return _hull_volume(self._hull, self.n)

    def support(self, y):
        return support_eval(self, y)

    def translate(self, t):
        t = _frac_point(t)
        return Polytope(tuple(sorted(tuple(a + b for a, b in zip(v, t)) for v in self.vertices)))

    def dilate(self, s):
        s = Fraction(s)
        if s < 0:
            raise GeometryError("negative dilation")
        if s == 0:
            return Polytope(((Fraction(0),) * self.n,))
        return Polytope(tuple(sorted(tuple(s * a for a in v) for v in self.vertices)))

    def linear_image(self, M):
        pts = [tuple(sum(Fraction(M[i][j]) * v[j] for j in range(len(v))) for i in range(len(M))) for v in self.vertices]
        return convex_hull(pts)

    def edges(self):
        """Vertex pairs spanning edges (1-faces)."""
        hd = self._hull
        V = [hd.points[i] for i in hd.vertices]
        if hd.dim == 0:
            return []
        if hd.dim == 1:
            return [(V[0], V[1])]
        planes = hd.facet_planes()
        P = hd.int_points
        vid = hd.vertices
        out = []
        for a in range(len(vid)):
            for b in range(a + 1, len(vid)):
                normals = [nrm for (nrm, off), _ in planes.items()
                           if _dot(nrm, P[vid[a]]) == off and _dot(nrm, P[vid[b]]) == off]
                if normals and rank([[Fraction(v) for v in nn] for nn in normals]) == hd.dim - 1:
                    out.append((hd.points[vid[a]], hd.points[vid[b]]))
        return sorted(out)

    def contains(self, x) -> bool:
        """Exact membership test."""
        x = _frac_point(x)
        return convex_hull(list(self.vertices) + [x]).vertices == self.vertices

    def to_json(self):
        from .serialize import rat

        return {"vertices": [[rat(c) for c in v] for v in self.vertices]}


def _hull_volume(hd: HullData, n: int) -> Fraction:
    if hd.dim < n:
        return Fraction(0)
    if n == 1:
        vals = [p[0] for p in hd.points]
        return max(vals) - min(vals)
    P = hd.int_points
    v0 = P[hd.vertices[0]]
    total = 0
    for nrm, off, idx in hd.facets:
        if _dot(nrm, v0) == off:
            continue
        M = [[a - b for a, b in zip(P[i], v0)] for i in idx]
        total += abs(int_det(M))
    return Fraction(total, factorial(n) * hd.scale**n)


def convex_hull(points) -> Polytope:
    points = list(points)
    if not points:
        raise GeometryError("convex hull of an empty point set")
    hd = hull_data(points)
    return Polytope(tuple(sorted(hd.points[i] for i in hd.vertices)))


def volume(P: Polytope) -> Fraction:
    return P.volume


def _check_same_dim(*bodies):
    dims = {b.n for b in bodies}
    if len(dims) != 1:
        raise GeometryError(f"dimension mismatch: {sorted(dims)}")


def minkowski_sum(P: Polytope, Q: Polytope) -> Polytope:
    _check_same_dim(P, Q)
    return convex_hull([tuple(a + b for a, b in zip(u, v)) for u in P.vertices for v in Q.vertices])


def mixed_volume(*bodies) -> Fraction:
    """V(K_1..K_n) by inclusion-exclusion over Minkowski subsums."""
    if len(bodies) == 1 and isinstance(bodies[0], (list, tuple)):
        bodies = tuple(bodies[0])
    if not bodies:
        raise GeometryError("mixed volume of no bodies")
    _check_same_dim(*bodies)
    n = bodies[0].n
    if len(bodies) != n:
        raise GeometryError(f"mixed volume in R^{n} needs {n} bodies, got {len(bodies)}")
    sums = {}
    total = Fraction(0)
    for mask in range(1, 1 << n):
        hi = mask.bit_length() - 1
        rest = mask & ~(1 << hi)
        sums[mask] = bodies[hi] if rest == 0 else minkowski_sum(sums[rest], bodies[hi])
        size = bin(mask).count("1")
        v = sums[mask].volume
        total += v if (n - size) % 2 == 0 else -v
    return total / factorial(n)


def support_eval(P: Polytope, y) -> Fraction:
    y = _frac_point(y)
    if len(y) != P.n:
        raise GeometryError("dimension mismatch in support_eval")
    return max(_dot(v, y) for v in P.vertices)


def box_polytope(lo, hi) -> Polytope:
    lo, hi = _frac_point(lo), _frac_point(hi)
    corners = [()]
    for a, b in zip(lo, hi):
        corners = [c + (x,) for c in corners for x in ((a, b) if a != b else (a,))]
    return convex_hull(corners)


def simplex(points) -> Polytope:
    return convex_hull(points)


def cross_polytope(n: int) -> Polytope:
    pts = []
    for i in range(n):
        for s in (1, -1):
            e = [Fraction(0)] * n
            e[i] = Fraction(s)
            pts.append(tuple(e))
    return convex_hull(pts)
