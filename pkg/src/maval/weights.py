"""Weight functions (constants, polynomials on boxes, smooth bumps) and box quadrature."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .exact_poly import Polynomial, VariableRegistry

Box = tuple  # ((lo_1, hi_1), ..., (lo_n, hi_n)) with exact rationals


class WeightError(ValueError):
    pass


def make_box(*bounds) -> Box:
    if len(bounds) == 1 and isinstance(bounds[0], (list, tuple)) and bounds[0] and isinstance(bounds[0][0], (list, tuple)):
        bounds = bounds[0]
    box = tuple((Fraction(lo), Fraction(hi)) for lo, hi in bounds)
    for lo, hi in box:
        if lo > hi:
            raise WeightError(f"empty box side [{lo}, {hi}]")
    return box


def unit_box(n: int) -> Box:
    return tuple((Fraction(0), Fraction(1)) for _ in range(n))


def cube(n: int, r) -> Box:
    r = Fraction(r)
    return tuple((-r, r) for _ in range(n))


def box_volume(box: Box) -> Fraction:
    v = Fraction(1)
    for lo, hi in box:
        v *= hi - lo
    return v


def box_intersect(a, b):
    if a is None:
        return b
    if b is None:
        return a
    out = tuple((max(x[0], y[0]), min(x[1], y[1])) for x, y in zip(a, b))
    if any(lo > hi for lo, hi in out):
        return ()
    return out


def is_full_dimensional(box) -> bool:
    return bool(box) and all(lo < hi for lo, hi in box)


def in_box(x, box) -> bool:
    return all(lo <= xi <= hi for xi, (lo, hi) in zip(x, box))


@lru_cache(maxsize=None)
def x_registry(n: int) -> VariableRegistry:
    return VariableRegistry([f"x_{i}" for i in range(1, n + 1)])


def integrate_monomial(mono, box) -> Fraction:
    out = Fraction(1)
    for e, (lo, hi) in zip(mono, box):
        out *= (hi ** (e + 1) - lo ** (e + 1)) / (e + 1)
    return out


def integrate_polynomial(p: Polynomial, box: Box):
    """Exact integral of a polynomial in ``x_1..x_n`` over a box."""
    if len(p.registry) != len(box):
        raise WeightError("box dimension does not match polynomial variables")
    total = Fraction(0)
    for m, c in p.terms.items():
        total = total + c * integrate_monomial(m, box)
    return total


# ---------------------------------------------------------------------------
# quadrature


@lru_cache(maxsize=64)
def _gl(nodes: int):
    x, w = np.polynomial.legendre.leggauss(nodes)
    return x, w


def tensor_grid(box: Box, nodes):
    """Points ``(N, n)`` and weights ``(N,)`` of a tensor Gauss–Legendre rule."""
    n = len(box)
    if isinstance(nodes, int):
        nodes = [nodes] * n
    axes, wts = [], []
    for (lo, hi), m in zip(box, nodes):
        x, w = _gl(int(m))
        lo, hi = float(lo), float(hi)
        axes.append(0.5 * (hi - lo) * x + 0.5 * (hi + lo))
        wts.append(0.5 * (hi - lo) * w)
    mesh = np.meshgrid(*axes, indexing="ij")
    W = wts[0]
    for w in wts[1:]:
        W = np.multiply.outer(W, w)
    X = np.stack([m.reshape(-1) for m in mesh], axis=-1)
    return X, W.reshape(-1)


def quad_box(func, box: Box, nodes=32):
    """Tensor Gauss–Legendre approximation of the integral of ``func(X)`` over ``box``."""
    if not box or any(lo == hi for lo, hi in box):
        return 0.0
    X, W = tensor_grid(box, nodes)
    return np.sum(W * func(X))


# ---------------------------------------------------------------------------
# weights


class Weight:
    n: int

    def __call__(self, X):  # X: array (..., n)
        raise NotImplementedError

    def support(self):
        """Bounding box of the support, or ``None`` for all of R^n."""
        return None

    def exact(self):
        """``(polynomial, box or None)`` when the weight is a polynomial on a box, else ``None``."""
        return None

    def __mul__(self, other):
        return ProductWeight((self, other))


@dataclass(frozen=True, eq=False)
class ConstantWeight(Weight):
    n: int
    value: Fraction = Fraction(1)

    def __call__(self, X):
        X = np.asarray(X, dtype=float)
        return np.full(X.shape[:-1], float(self.value))

    def exact(self):
        return Polynomial.constant(x_registry(self.n), self.value), None


@dataclass(frozen=True, eq=False)
class PolynomialWeight(Weight):
    """A polynomial in ``x_1..x_n`` times the indicator of ``box`` (``None``: no cutoff)."""

    poly: Polynomial
    box: Box = None

    def __post_init__(self):
        if self.poly.registry != x_registry(len(self.poly.registry)):
            raise WeightError("polynomial weights use variables x_1..x_n")

    @property
    def n(self):
        return len(self.poly.registry)

    def __call__(self, X):
        X = np.asarray(X, dtype=float)
        vals = self.poly.to_callable()(*[X[..., i] for i in range(self.n)])
        vals = np.broadcast_to(np.real_if_close(np.asarray(vals, dtype=complex)) if not self.poly.is_real() else np.asarray(vals, dtype=float), X.shape[:-1])
        if self.box is None:
            return np.array(vals)
        mask = np.ones(X.shape[:-1], dtype=bool)
        for i, (lo, hi) in enumerate(self.box):
            mask &= (X[..., i] >= float(lo)) & (X[..., i] <= float(hi))
        return np.where(mask, vals, 0.0)

    def support(self):
        return self.box

    def exact(self):
        return self.poly, self.box


@dataclass(frozen=True, eq=False)
class BumpWeight(Weight):
    """amplitude * prod_i exp(1/((x_i - x0_i)^2/sigma^2 - 1)) on the open cube of radius sigma."""

    center: tuple
    sigma: Fraction = Fraction(1)
    amplitude: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(Fraction(c) for c in self.center))
        object.__setattr__(self, "sigma", Fraction(self.sigma))
        if self.sigma <= 0:
            raise WeightError("bump radius must be positive")

    @property
    def n(self):
        return len(self.center)

    def __call__(self, X):
        X = np.asarray(X, dtype=float)
        out = np.full(X.shape[:-1], float(self.amplitude))
        s = float(self.sigma)
        for i, c in enumerate(self.center):
            u = ((X[..., i] - float(c)) / s) ** 2
            inside = u < 1.0
            val = np.zeros_like(u)
            val[inside] = np.exp(1.0 / (u[inside] - 1.0))
            out = out * val
        return out

    def support(self):
        return tuple((c - self.sigma, c + self.sigma) for c in self.center)


@dataclass(frozen=True, eq=False)
class ProductWeight(Weight):
    factors: tuple

    def __post_init__(self):
        flat = []
        for f in self.factors:
            flat.extend(f.factors if isinstance(f, ProductWeight) else (f,))
        if len({f.n for f in flat}) != 1:
            raise WeightError("weights of mixed dimension")
        object.__setattr__(self, "factors", tuple(flat))

    @property
    def n(self):
        return self.factors[0].n

    def __call__(self, X):
        out = None
        for f in self.factors:
            v = f(X)
            out = v if out is None else out * v
        return out

    def support(self):
        box = None
        for f in self.factors:
            box = box_intersect(box, f.support())
        return box

    def exact(self):
        poly, box = Polynomial.one(x_registry(self.n)), None
        for f in self.factors:
            e = f.exact()
            if e is None:
                return None
            poly = poly * e[0]
            box = box_intersect(box, e[1])
        return poly, box


@dataclass(frozen=True, eq=False)
class ShiftedWeight(Weight):
    """x -> base(x - shift)."""

    base: Weight
    shift: tuple

    def __post_init__(self):
        object.__setattr__(self, "shift", tuple(Fraction(s) for s in self.shift))

    @property
    def n(self):
        return self.base.n

    def __call__(self, X):
        X = np.asarray(X, dtype=float)
        return self.base(X - np.array([float(s) for s in self.shift]))

    def support(self):
        b = self.base.support()
        if b is None:
            return None
        return tuple((lo + s, hi + s) for (lo, hi), s in zip(b, self.shift))


@dataclass(frozen=True, eq=False)
class SumWeight(Weight):
    """sum_i c_i w_i."""

    terms: tuple

    @property
    def n(self):
        return self.terms[0][1].n

    def __call__(self, X):
        out = None
        for c, w in self.terms:
            v = float(c) * w(X)
            out = v if out is None else out + v
        return out

    def support(self):
        boxes = [w.support() for _, w in self.terms]
        if any(b is None for b in boxes):
            return None
        return tuple((min(b[i][0] for b in boxes), max(b[i][1] for b in boxes)) for i in range(self.n))


@dataclass(frozen=True, eq=False)
class CallableWeight(Weight):
    """An arbitrary vectorised function with a declared support box."""

    n: int
    func: object
    box: Box = None

    def __call__(self, X):
        return self.func(np.asarray(X, dtype=float))

    def support(self):
        return self.box


def integrate_weight(w: Weight, box: Box, nodes=32, exact=True):
    """Integral of ``w`` over ``box``: exact for polynomial weights, otherwise quadrature."""
    if exact:
        e = w.exact()
        if e is not None:
            b = box_intersect(box, e[1])
            return Fraction(0) if not b else integrate_polynomial(e[0], b)
    b = box_intersect(box, w.support())
    if not b:
        return 0.0
    return float(quad_box(w, b, nodes))


def weight_to_json(w: Weight):
    from .serialize import rat

    if isinstance(w, ConstantWeight):
        return {"type": "constant", "n": w.n, "value": rat(w.value)}
    if isinstance(w, PolynomialWeight):
        return {"type": "polynomial", "poly": str(w.poly), "n": w.n,
                "box": None if w.box is None else [[rat(a), rat(b)] for a, b in w.box]}
    if isinstance(w, BumpWeight):
        return {"type": "bump", "center": [rat(c) for c in w.center], "sigma": rat(w.sigma), "amplitude": w.amplitude}
    if isinstance(w, ProductWeight):
        return {"type": "product", "factors": [weight_to_json(f) for f in w.factors]}
    if isinstance(w, ShiftedWeight):
        return {"type": "shifted", "base": weight_to_json(w.base), "shift": [rat(s) for s in w.shift]}
    if isinstance(w, SumWeight):
        return {"type": "sum", "terms": [{"c": rat(c), "w": weight_to_json(x)} for c, x in w.terms]}
    raise WeightError(f"unknown weight {type(w).__name__}")


def weight_from_json(obj, n=None) -> Weight:
    from .exact_poly import parse_polynomial
    from .serialize import parse_rat

    t = obj.get("type")
    if t == "constant":
        return ConstantWeight(int(obj.get("n", n)), parse_rat(obj.get("value", "1")))
    if t == "polynomial":
        nn = int(obj.get("n", n))
        box = obj.get("box")
        return PolynomialWeight(parse_polynomial(obj["poly"], x_registry(nn)), None if box is None else make_box(*[(parse_rat(a), parse_rat(b)) for a, b in box]))
    if t == "bump":
        return BumpWeight(tuple(parse_rat(c) for c in obj["center"]), parse_rat(obj.get("sigma", "1")), float(obj.get("amplitude", 1.0)))
    if t == "product":
        return ProductWeight(tuple(weight_from_json(f, n) for f in obj["factors"]))
    if t == "shifted":
        return ShiftedWeight(weight_from_json(obj["base"], n), tuple(parse_rat(s) for s in obj["shift"]))
    if t == "sum":
        return SumWeight(tuple((parse_rat(x["c"]), weight_from_json(x["w"], n)) for x in obj["terms"]))
    raise WeightError(f"unknown weight type {t!r}")
