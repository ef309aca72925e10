"""Neighbour chains pinned at a_s = (1 - eps) E|A_s| over an eps sweep.

Each row is one eps with the chain a_1, a_2, a_4, ..., a_s and the
largest cubic residual.
"""

import csv
from dataclasses import dataclass

import numpy as np
from _config import from_args

from dyadic_expanders.bounds import cubic_residuals, expected_chain, solve_constrained_chain


@dataclass
class Config:
    n: int = 2**20
    d: int = 8
    s: int = 2048
    eps_max: float = 0.9
    steps: int = 19
    out: str = "constrained_chains.csv"


def main(cfg: Config):
    base = expected_chain(cfg.n, cfg.d, cfg.s)
    labels = [f"a_{int(i)}" for i in base.indices]
    with open(cfg.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["eps", *labels, "max_abs_residual"])
        w.writerow(["expected", *("%.17g" % v for v in base.values),
                    "%.3g" % max(abs(r) for r in cubic_residuals(base))])
        for eps in np.linspace(0.0, cfg.eps_max, cfg.steps):
            ch = solve_constrained_chain(cfg.n, cfg.d, cfg.s, (1 - eps) * base.top)
            res = max(abs(r) for r in cubic_residuals(ch))
            w.writerow(["%.17g" % eps, *("%.17g" % v for v in ch.values), "%.3g" % res])
    print(f"wrote {cfg.steps} chains -> {cfg.out}")


if __name__ == "__main__":
    main(from_args(Config, __doc__.splitlines()[0]))
