"""Fourier–Laplace values of phi • Psi_P: product formula, polarization path, decay reports."""

from __future__ import annotations

import csv
import io
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from itertools import combinations

import numpy as np

from .ma_operators import SmoothFunction, _numeric_integrand, check_invariant_part, invariant_registry
from .minor_spaces import hessian_minor_space
from .parallel import thread_map
from .valuation_lab import QPolynomial, _s_part, q_polynomial
from .weights import Weight, tensor_grid

MAX_NODES = 512
MIN_NODES = 32


class FourierError(ValueError):
    pass


def _support_box(phi: Weight):
    box = phi.support()
    if box is None or not box:
        raise FourierError("only compactly supported weights are transformed")
    return box


def _diam(box):
    return math.sqrt(sum(float(hi - lo) ** 2 for lo, hi in box))


def node_count(freq: float, box, base: int = 16) -> int:
    """Per-axis Gauss–Legendre nodes for a phase of size |w| over the box."""
    m = math.ceil(base * (1.0 + freq * _diam(box) / math.pi))
    return int(min(MAX_NODES, max(MIN_NODES, m)))


def as_point(w, n: int, cols: int):
    W = np.asarray(w, dtype=complex)
    if W.ndim == 1:
        W = W.reshape(n, 1) if cols == 1 else W.reshape(cols, n).T
    if W.shape != (n, cols):
        raise FourierError(f"expected an {n} x {cols} complex matrix, got shape {W.shape}")
    if not np.all(np.isfinite(W)):
        raise FourierError("non-finite entries in w")
    return W


def d_of(W) -> np.ndarray:
    """d(w) = sum of the columns."""
    return np.asarray(W).sum(axis=1)


def _oscillatory(phi: Weight, w, extra=None, nodes=None):
    """Integral of phi(x) e^{-i<w,x>} extra(x) over supp phi."""
    w = np.asarray(w, dtype=complex).reshape(-1)
    box = _support_box(phi)
    if len(w) != len(box):
        raise FourierError("frequency has the wrong dimension")
    m = nodes or node_count(float(np.linalg.norm(w)), box)
    X, Wt = tensor_grid(box, m)
    phase = np.exp(-1j * (X @ w))
    vals = phi(X) * phase
    if extra is not None:
        vals = vals * extra(X)
    out = np.sum(Wt * vals)
    if not np.isfinite(out):
        raise FourierError("quadrature overflow; reduce |Im w| or the support")
    return complex(out)


def fourier_weight(phi: Weight, w, nodes=None) -> complex:
    """Integral of phi(x) exp(-i<w, x>) dx (tensor Gauss–Legendre over the support box)."""
    return _oscillatory(phi, w, None, nodes)


def f_hat_product(phi: Weight, Q: QPolynomial, w, nodes=None) -> complex:
    """((-1)^k / k!) Q(w_1..w_k) times the transform of phi at d(w)."""
    k, n = Q.k, Q.n
    W = as_point(w, n, k + 1)
    qv = Q(W[:, :k]) if k else complex(Q.poly.constant_term())
    if qv == 0:
        return 0j
    return (-1) ** k / math.factorial(k) * qv * fourier_weight(phi, d_of(W), nodes)


def _exp_sum(ys):
    """Smooth function x -> sum_j exp(<y_j, x>) with its derivatives."""
    Y = np.array(ys, dtype=float)  # (m, n)
    n = Y.shape[1]

    def e(X):
        return np.exp(X @ Y.T)  # (..., m)

    return SmoothFunction(
        n,
        lambda X: e(X).sum(axis=-1),
        lambda X: e(X) @ Y,
        lambda X: np.einsum("...m,mi,mj->...ij", e(X), Y, Y),
    )


def f_hat_polarization(phi: Weight, P, k: int, w, nodes=None) -> complex:
    """(1/k!) times the lambda_1..lambda_k coefficient of the transform of Psi_P(sum lambda_j e^{<y_j,.>}).

    Requires w_j = i y_j (purely imaginary) for j <= k.  The multilinear
    coefficient is extracted by inclusion-exclusion over lambda in {0,1}^k,
    which is exact for a polynomial homogeneous of degree k in lambda.
    """
    n = phi.n
    P = check_invariant_part(P, n)
    S = _s_part(P, n)
    if S.terms and (not S.is_homogeneous() or S.degree() != k):
        raise FourierError(f"P must be homogeneous of degree {k} in the Hessian variables")
    W = as_point(w, n, k + 1)
    if np.any(np.abs(W[:, :k].real) > 1e-14):
        raise FourierError("the first k columns must be purely imaginary")
    ys = [W[:, j].imag for j in range(k)]
    wk1 = W[:, k]
    box = _support_box(phi)
    m = nodes or node_count(float(np.linalg.norm(d_of(W))), box)
    if k == 0:
        return complex(S.constant_term()) * fourier_weight(phi, wk1, m)
    X, Wt = tensor_grid(box, m)
    base = phi(X) * np.exp(-1j * (X @ wk1))
    total = 0j
    for size in range(1, k + 1):
        sign = 1 if (k - size) % 2 == 0 else -1
        for sub in combinations(range(k), size):
            integrand = _numeric_integrand(P, _exp_sum([ys[j] for j in sub]))
            total += sign * np.sum(Wt * base * integrand(X))
    if not np.isfinite(total):
        raise FourierError("quadrature overflow; reduce |y| or the support")
    return complex(total) / math.factorial(k)


# ---------------------------------------------------------------------------
# coordinate change


def to_F_coordinates(fhat, k: int):
    """F(Psi)[w] = (k!/(-1)^k) fhat[w_1..w_k, w_{k+1} - sum_{j<=k} w_j]."""
    c = math.factorial(k) / (-1) ** k

    def F(W):
        W = np.array(W, dtype=complex)
        V = W.copy()
        V[:, k] = W[:, k] - W[:, :k].sum(axis=1)
        return c * fhat(V)

    return F


def from_F_coordinates(F, k: int):
    """fhat[w] = ((-1)^k/k!) F[w_1..w_k, sum_{j<=k+1} w_j]."""
    c = (-1) ** k / math.factorial(k)

    def fhat(W):
        W = np.array(W, dtype=complex)
        V = W.copy()
        V[:, k] = W.sum(axis=1)
        return c * F(V)

    return fhat


coordinate_change_F = to_F_coordinates


# ---------------------------------------------------------------------------
# normalization constant


def load_normalization(n: int | None = None, k: int | None = None) -> Fraction:
    data = json.loads(resources.files("maval").joinpath("data/normalization.json").read_text())
    if n is not None and k is not None:
        key = f"{n},{k}"
        if key in data.get("per_shape", {}):
            return Fraction(data["per_shape"][key])
    return Fraction(data["constant"])


def calibrate_normalization(phi: Weight, P, k: int, points: int = 8, seed: int = 0, y_scale=1.0, nodes=None):
    """Measure polarization / product (with normalization 1) at random points.

    Returns ``(ratio, log)`` where ``ratio`` is the best small rational fit and
    ``log`` lists the individual ratios.
    """
    n = phi.n
    Q = q_polynomial(P, k, n, normalization=1)
    rng = np.random.default_rng(seed)
    ratios = []
    for _ in range(points):
        W = _random_imag_point(rng, n, k, y_scale)
        a = f_hat_polarization(phi, P, k, W, nodes)
        b = f_hat_product(phi, Q, W, nodes)
        if abs(b) > 1e-12:
            ratios.append(a / b)
    if not ratios:
        raise FourierError("no usable calibration points")
    mean = complex(np.mean(ratios))
    fit = Fraction(mean.real).limit_denominator(24)
    return fit, [complex(r) for r in ratios]


def _random_imag_point(rng, n, k, y_scale=1.0):
    W = np.zeros((n, k + 1), dtype=complex)
    W[:, :k] = 1j * rng.uniform(-y_scale, y_scale, size=(n, k))
    W[:, k] = rng.uniform(-3, 3, size=n) + 1j * rng.uniform(-1, 1, size=n)
    return W


def random_imag_point(seed: int, n: int, k: int, y_scale=1.0):
    return _random_imag_point(np.random.default_rng(seed), n, k, y_scale)


# ---------------------------------------------------------------------------
# decay report


def h_box(A, y) -> float:
    """Support function of the box A at a real vector y."""
    return float(sum(max(float(lo) * v, float(hi) * v) for (lo, hi), v in zip(A, y)))


@dataclass
class DecayReport:
    N: int
    sup: float
    grid_size: int
    seed: int
    box: tuple
    refined_sup: float = float("nan")
    refined_grid_size: int = 0
    values: list = field(default_factory=list, repr=False)

    @property
    def growth(self) -> float:
        if self.sup == 0:
            return 1.0 if self.refined_sup == 0 else float("inf")
        return self.refined_sup / self.sup

    @property
    def stable(self) -> bool:
        return math.isfinite(self.sup) and math.isfinite(self.refined_sup) and self.growth < 2.0

    def csv_row(self):
        return [self.N, repr(self.sup), self.grid_size, self.seed, ";".join(f"{lo}:{hi}" for lo, hi in self.box)]

    def to_json(self):
        from .serialize import rat

        return {
            "N": self.N,
            "sup": self.sup,
            "grid_size": self.grid_size,
            "refined_sup": self.refined_sup,
            "refined_grid_size": self.refined_grid_size,
            "growth": self.growth,
            "stable": self.stable,
            "seed": self.seed,
            "box": [[rat(lo), rat(hi)] for lo, hi in self.box],
        }


def reports_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "sup", "grid_size", "seed", "box"])
    for r in reports:
        w.writerow(r.csv_row())
    return buf.getvalue()


def _grid_setup(seed, n, k):
    rng = random.Random(seed)

    def unit():
        v = np.array([rng.gauss(0, 1) for _ in range(n)])
        return v / np.linalg.norm(v)

    u, v = unit(), unit()
    cols = np.array([[complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(k)] for _ in range(n)]).reshape(n, k)
    return u, v, cols


def pws_grid(seed: int, n: int, k: int, m: int, radius: float = 10.0):
    """Deterministic sample points w with d(w) = s u + i t v, (s, t) on an m x m lattice."""
    u, v, cols = _grid_setup(seed, n, k)
    pts = []
    for s in np.linspace(-radius, radius, m):
        for t in np.linspace(-radius, radius, m):
            d = s * u + 1j * t * v
            W = np.zeros((n, k + 1), dtype=complex)
            W[:, :k] = cols
            W[:, k] = d - cols.sum(axis=1)
            pts.append(W)
    return pts


def _decay_quantity(phi, Q, W, N, A):
    k = Q.k
    d = d_of(W)
    val = abs(f_hat_product(phi, Q, W))
    denom = float(np.prod([np.linalg.norm(W[:, j]) ** 2 for j in range(k)])) if k else 1.0
    if denom == 0:
        raise FourierError("grid point with a vanishing column")
    return val * (1 + np.linalg.norm(d)) ** N * math.exp(-h_box(A, d.imag)) / denom


def pws_decay_report(phi: Weight, P, k: int, A, N: int, seed: int = 0, m: int = 21, radius: float = 10.0,
                     refine: bool = True, normalization=None) -> DecayReport:
    """Sampled sup of |F(phi • Psi_P)(w)| (1+|d|)^N exp(-h_A(Im d)) / prod |w_j|^2.

    With ``refine`` the lattice is also sampled at 2m - 1 points per axis
    (a nested refinement) and the second sup is recorded.
    """
    n = phi.n
    A = tuple((Fraction(lo), Fraction(hi)) for lo, hi in A)
    supp = phi.support()
    if supp is not None and any(lo < a or hi > b for (lo, hi), (a, b) in zip(supp, A)):
        raise FourierError("the box A must contain the support of phi")
    norm = load_normalization(n, k) if normalization is None else normalization
    S = _s_part(check_invariant_part(P, n), n)
    if S.is_zero():
        zeros = [0.0] * (m * m)
        rep = DecayReport(N, 0.0, m * m, seed, A, 0.0 if refine else float("nan"), (2 * m - 1) ** 2 if refine else 0, zeros)
        return rep
    Q = q_polynomial(P, k, n, normalization=norm)

    def sup_on(mm):
        vals = thread_map(lambda W: _decay_quantity(phi, Q, W, N, A), pws_grid(seed, n, k, mm, radius))
        return max(vals), vals

    sup, vals = sup_on(m)
    rep = DecayReport(N, float(sup), m * m, seed, A, values=[float(v) for v in vals])
    if refine:
        rsup, _ = sup_on(2 * m - 1)
        rep.refined_sup = float(rsup)
        rep.refined_grid_size = (2 * m - 1) ** 2
    return rep
