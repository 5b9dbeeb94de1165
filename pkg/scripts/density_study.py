"""Spanning ranks of transported mixed-MA functionals for several convex families."""

from dataclasses import dataclass, field
from itertools import product

from fractions import Fraction

from maval.convex_functions import Quadratic, SupportFn, zero_function
from maval.convex_geometry import convex_hull
from maval.density_experiments import spanning_rank

from _config import emit, parse_config


@dataclass
class Config:
    pairs: list = field(default_factory=lambda: [[1, 0], [1, 1], [2, 0], [2, 1], [2, 2], [3, 1], [3, 2], [3, 3]])
    families: list = field(default_factory=lambda: ["zero", "simplex", "parallelotope", "quadratic", "mixed"])
    g_samples: int = -1  # -1: one transport per dimension of the target space
    seed: int = 0


def family(name, n):
    simplex = SupportFn(convex_hull([(0,) * n] + [tuple(int(i == j) for j in range(n)) for i in range(n)]))
    cube = SupportFn(convex_hull(list(product((0, 1), repeat=n))))
    half = Quadratic(tuple(tuple(Fraction(1, 2) * (i == j) for j in range(n)) for i in range(n)), None)
    return {"zero": [zero_function(n)], "simplex": [simplex], "parallelotope": [cube],
            "quadratic": [half], "mixed": [simplex, half]}[name]


def run(cfg: Config):
    rows = []
    for n, k in cfg.pairs:
        for name in cfg.families:
            rep = spanning_rank(family(name, n), n, k, g_samples=None if cfg.g_samples < 0 else cfg.g_samples,
                                seed=cfg.seed, describe=[name])
            rows.append({"n": n, "k": k, "family": name, "rank": rep.rank, "N": rep.N, "dichotomy": rep.dichotomy})
    return {"config": cfg.__dict__, "rows": rows, "note": "finite rank certificates only; closures are not computed"}


if __name__ == "__main__":
    cfg, out = parse_config(Config, __doc__.splitlines()[0])
    emit(run(cfg), out)
