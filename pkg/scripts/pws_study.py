"""Decay of weighted transforms against the box exponential, for several N and grid sizes."""

from dataclasses import dataclass, field
from fractions import Fraction

from maval.fourier_pws import pws_decay_report, reports_csv
from maval.valuation_lab import invariant_basis
from maval.weights import BumpWeight

from _config import emit, parse_config


@dataclass
class Config:
    shapes: list = field(default_factory=lambda: [[1, 1], [2, 1]])
    orders: list = field(default_factory=lambda: [0, 1, 2, 3])
    grid: int = 21
    radius: float = 10.0
    sigma: str = "1/2"
    seed: int = 0
    csv: str = ""


def run(cfg: Config):
    out, reports = [], []
    s = Fraction(cfg.sigma)
    for n, k in cfg.shapes:
        phi = BumpWeight((0,) * n, s)
        P = next(p for p in invariant_basis(n, 0) if p.degree() == k)
        A = tuple((-s, s) for _ in range(n))
        for N in cfg.orders:
            rep = pws_decay_report(phi, P, k, A, N, seed=cfg.seed, m=cfg.grid if n == 1 else max(5, cfg.grid // 2),
                                   radius=cfg.radius)
            reports.append(rep)
            out.append({"n": n, "k": k, **rep.to_json(), "growth": rep.growth, "stable": rep.stable})
    if cfg.csv:
        with open(cfg.csv, "w", encoding="utf-8") as fh:
            fh.write(reports_csv(reports))
    return {"config": cfg.__dict__, "reports": out}


if __name__ == "__main__":
    cfg, out = parse_config(Config, __doc__.splitlines()[0])
    emit(run(cfg), out)
