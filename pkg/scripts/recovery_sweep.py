"""ER and SSMP success rates on random SE/SSE matrices as k grows.

Matrices are not certified here; the point is the empirical success
curve away from the small certified corpus.
"""

import csv
from dataclasses import dataclass

import numpy as np
from _config import from_args

from dyadic_expanders.matrices import generate
from dyadic_expanders.recovery import (RecoveryProblem, er_recover, random_sparse_vector,
                                       ssmp_recover)


@dataclass
class Config:
    n: int = 128
    N: int = 256
    d: int = 8
    kmax: int = 24
    kstep: int = 2
    trials: int = 50
    signed: bool = False
    seed: int = 0
    out: str = "recovery_sweep.csv"


def main(cfg: Config):
    with open(cfg.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "er_success", "ssmp_success", "er_mean_iterations"])
        for k in range(cfg.kstep, cfg.kmax + 1, cfg.kstep):
            er_ok = ssmp_ok = 0
            iters = []
            for t in range(cfg.trials):
                A = generate(cfg.n, cfg.N, cfg.d, signed=cfg.signed, seed=cfg.seed, key=(k, t))
                x = random_sparse_vector(cfg.N, k, seed=cfg.seed + 7919 * k + t)
                P = RecoveryProblem.noiseless(A, x)
                e = er_recover(P)
                s = ssmp_recover(P)
                er_ok += bool(np.array_equal(e.estimate, x))
                ssmp_ok += bool(np.array_equal(s.estimate, x))
                iters.append(e.iterations)
            w.writerow([k, er_ok / cfg.trials, ssmp_ok / cfg.trials, "%.3f" % np.mean(iters)])
            print(f"k={k:3d}  ER {er_ok}/{cfg.trials}  SSMP {ssmp_ok}/{cfg.trials}")


if __name__ == "__main__":
    main(from_args(Config, __doc__.splitlines()[0]))
