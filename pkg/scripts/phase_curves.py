"""Phase-transition curves rho(delta) for the standard sweeps.

Families: n varied at d=8, eps=1/4; d varied at eps=1/6; eps varied at
d=8; the three algorithm curves; and the baseline bound next to the
dyadic one. Every point carries its status and root residual, so
no-root markers are visible in the output.
"""

import csv
from dataclasses import dataclass
from fractions import Fraction

from _config import from_args

from dyadic_expanders.phase import phase_curve

DELTAS = tuple(round(0.05 * i, 2) for i in range(1, 20))


@dataclass
class Config:
    n: int = 2**10
    ns: tuple = (2**10, 2**20, 2**30, 2**40)
    ds: tuple = (4, 8, 16, 32)
    bi_n: int = 2**20
    threads: int = 1
    out: str = "phase_curves.csv"


def families(cfg: Config):
    for n in cfg.ns:
        yield f"n={n}", phase_curve(DELTAS, 8, 0.25, n, threads=cfg.threads)
    for d in cfg.ds:
        yield f"d={d}", phase_curve(DELTAS, d, 1 / 6, cfg.n, threads=cfg.threads)
    for eps in (Fraction(1, 16), Fraction(1, 6), Fraction(1, 4)):
        yield f"eps={eps}", phase_curve(DELTAS, 8, float(eps), cfg.n, threads=cfg.threads)
    for n in (cfg.n, cfg.ns[-1]):
        for alg in ("er", "l1", "ssmp"):
            yield f"alg={alg},n={n}", phase_curve(DELTAS, 8, alg, n, kind="alg",
                                                  threads=cfg.threads)
    for kind in ("bi", "exp"):
        yield f"{kind},n={cfg.bi_n}", phase_curve(DELTAS, 8, 0.25, cfg.bi_n, kind=kind,
                                                  threads=cfg.threads)


def main(cfg: Config):
    with open(cfg.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["family", "kind", "d", "eps", "n", "delta", "rho", "status", "residual"])
        for name, c in families(cfg):
            for p in c.points():
                w.writerow([name, c.kind, c.d, "%.17g" % float(c.eps), c.n, "%.17g" % p.delta,
                            "%.17g" % p.rho if p.ok else "", p.status, "%.3g" % p.residual])
            roots = sum(c.ok)
            print(f"{name:>22}: {roots:2d}/{len(DELTAS)} roots")
    print(f"-> {cfg.out}")


if __name__ == "__main__":
    main(from_args(Config, __doc__.splitlines()[0]))
