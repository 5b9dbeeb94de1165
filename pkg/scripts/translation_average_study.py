"""Convergence of translation averages eps^n sum_k phi(x - eps k) to the integral of phi.

The schedule is K = m^2, eps = 1/m.  A weight with jumps gives first-order
convergence in eps; a smooth bump converges much faster.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from maval.density_experiments import square_schedule, translation_average
from maval.exact_poly import Polynomial, parse_polynomial
from maval.ma_operators import LocalFunctional, invariant_registry
from maval.weights import BumpWeight, PolynomialWeight, x_registry

from _config import emit, parse_config


@dataclass
class Config:
    ms: list = field(default_factory=lambda: [2, 4, 8, 16, 32])
    samples: int = 801
    window: float = 1.0


def weights():
    box = PolynomialWeight(Polynomial.constant(x_registry(1), 1), ((Fraction(-1, 3), Fraction(1, 3)),))
    return {"box": box, "bump": BumpWeight((0,), Fraction(1, 2))}


def run(cfg: Config):
    P = parse_polynomial("s_1_1", invariant_registry(1))
    out = {}
    for name, w in weights().items():
        psi = LocalFunctional(1, ((w, P),))
        errs = []
        for m in cfg.ms:
            K, eps = square_schedule(m)
            rep = translation_average(psi, K, eps, window=[(-cfg.window, cfg.window)], samples=cfg.samples)
            errs.append({"m": m, "K": K, "eps": str(eps), "limit": rep.limits[0], "sup_error": rep.sup_distance[0]})
        for a, b in zip(errs, errs[1:]):
            b["ratio"] = b["sup_error"] / a["sup_error"] if a["sup_error"] else None
        out[name] = errs
    return {"config": cfg.__dict__, "weights": out}


if __name__ == "__main__":
    cfg, out = parse_config(Config, __doc__.splitlines()[0])
    emit(run(cfg), out)
