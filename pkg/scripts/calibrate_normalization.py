"""Measure the constant relating the product and polarization transforms.

For each shape (n, k) the ratio polarization / product (with constant 1) is
sampled at random points and fitted by a small rational.  The stored value in
``maval/data/normalization.json`` is what this script reproduces.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from maval.exact_poly import Polynomial
from maval.fourier_pws import calibrate_normalization, load_normalization
from maval.valuation_lab import invariant_basis
from maval.weights import BumpWeight

from _config import emit, parse_config


@dataclass
class Config:
    shapes: list = field(default_factory=lambda: [[1, 1], [2, 1], [2, 2]])
    points: int = 8
    seed: int = 0
    y_scale: float = 1.0


def run(cfg: Config):
    rows = []
    for n, k in cfg.shapes:
        phi = BumpWeight((Fraction(1, 4),) * n, Fraction(3, 4))
        parts = [p for p in invariant_basis(n, 0) if p.degree() == k]
        P = sum((p.scale(j + 1) for j, p in enumerate(parts)), Polynomial.zero(parts[0].registry))
        fit, ratios = calibrate_normalization(phi, P, k, points=cfg.points, seed=cfg.seed, y_scale=cfg.y_scale)
        spread = max(abs(r - complex(fit)) for r in ratios)
        rows.append({"n": n, "k": k, "fit": str(fit), "stored": str(load_normalization(n, k)),
                     "max_deviation": float(spread), "mean_ratio": [float(np.mean(ratios).real), float(np.mean(ratios).imag)]})
    return {"config": cfg.__dict__, "shapes": rows}


if __name__ == "__main__":
    cfg, out = parse_config(Config, __doc__.splitlines()[0])
    emit(run(cfg), out)
