"""Phase-transition curves rho(delta) for lossless expansion.

For a sampling ratio ``delta = n / N`` the transition ``rho`` is the
largest ``k / n`` below which the union-bound exponent stays negative.
``k`` is treated as a real number and the exponent is evaluated at
finite ``n``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .bounds import ExpanderParams, RegimeError, psi_net
from .splitmodel import shannon_entropy

__all__ = [
    "ALGORITHM_EPS",
    "PhasePoint",
    "PhaseCurve",
    "exponent",
    "psi_bi",
    "find_transition",
    "rho_exp",
    "rho_exp_bi",
    "rho_alg",
    "phase_curve",
]

# epsilon thresholds of the l1, SSMP and ER recovery guarantees
ALGORITHM_EPS = {"l1": Fraction(1, 6), "ssmp": Fraction(1, 16), "er": Fraction(1, 4)}

ROOT_TOL = 1e-10
MAX_BISECT = 200
SCAN_POINTS = 64

# point statuses
OK = "ok"
NO_ROOT_POSITIVE = "no-root-positive"  # exponent > 0 already at the smallest k: marker 0
NO_ROOT_NEGATIVE = "no-root-negative"  # exponent < 0 across the bracket: marker 1
DISCONTINUITY = "discontinuity"  # sign change across a jump, residual above tolerance


def psi_bi(rho, delta, d, eps) -> float:
    """Baseline exponent H(rho delta) + d rho delta H(eps) + eps d rho delta log(d rho)."""
    x = rho * delta
    return (shannon_entropy(x) + d * x * shannon_entropy(eps)
            + eps * d * x * math.log(d * rho))


def exponent(kind: str, rho, delta, d, eps, n) -> float:
    """The function whose first zero in rho defines the transition."""
    if kind == "bi":
        return psi_bi(rho, delta, d, eps)
    if kind == "exp":
        return psi_net(ExpanderParams(k=rho * n, n=n, N=n / delta, d=d, eps=eps))
    raise ValueError(f"unknown exponent kind {kind!r}")


def _bracket(delta, d, eps, n) -> tuple[float, float]:
    # k >= 2, (1 - eps) d k <= n and k <= N / 2
    hi = min(1.0, 1.0 / ((1.0 - eps) * d), 1.0 / (2.0 * delta)) * (1.0 - 1e-9)
    return 2.0 / n, hi


def _validate(delta, d, eps, n):
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if not 0.0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    if d < 1 or n < 2 or d > n:
        raise ValueError(f"need 1 <= d <= n and n >= 2, got d={d}, n={n}")


@dataclass(frozen=True)
class PhasePoint:
    delta: float
    rho: float
    status: str
    residual: float

    @property
    def ok(self) -> bool:
        return self.status == OK


def find_transition(kind, delta, d, eps, n) -> PhasePoint:
    """First upward zero crossing of the exponent in rho.

    The bracket ``[2/n, min(1, 1/((1-eps) d), 1/(2 delta)) (1 - 1e-9)]`` is
    scanned on a geometric grid; the first sign change is then bisected
    until the residual is below ``ROOT_TOL`` or 200 halvings are spent.
    """
    _validate(delta, d, eps, n)
    eps = float(eps)
    lo, hi = _bracket(delta, d, eps, n)
    if not lo < hi:
        raise RegimeError(f"empty rho bracket [{lo}, {hi}] for n={n}, d={d}, eps={eps}")

    def f(rho):
        return exponent(kind, rho, delta, d, eps, n)

    f_lo = f(lo)
    if f_lo >= 0.0:
        return PhasePoint(delta, 0.0, NO_ROOT_POSITIVE, f_lo)
    ratio = (hi / lo) ** (1.0 / SCAN_POINTS)
    a, fa = lo, f_lo
    for i in range(1, SCAN_POINTS + 1):
        b = hi if i == SCAN_POINTS else lo * ratio**i
        fb = f(b)
        if fb >= 0.0:
            break
        a, fa = b, fb
    else:
        return PhasePoint(delta, 1.0, NO_ROOT_NEGATIVE, fa)
    if fb == 0.0:
        return PhasePoint(delta, b, OK, 0.0)
    # f(a) < 0 <= f(b)
    for _ in range(MAX_BISECT):
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        fm = f(mid)
        if fm < 0.0:
            a, fa = mid, fm
        else:
            b, fb = mid, fm
        if min(-fa, fb) < ROOT_TOL and b - a <= ROOT_TOL * b:
            break
    rho, res = (a, fa) if -fa <= fb else (b, fb)
    status = OK if abs(res) < ROOT_TOL else DISCONTINUITY
    return PhasePoint(delta, rho, status, res)


def rho_exp(delta, d, epsilon, n) -> float:
    """Transition of the dyadic-splitting bound; 0 or 1 are no-root markers."""
    return find_transition("exp", delta, d, epsilon, n).rho


def rho_exp_bi(delta, d, epsilon, n) -> float:
    """Transition of the baseline (single-split) bound; 0 or 1 are no-root markers."""
    return find_transition("bi", delta, d, epsilon, n).rho


def _multiplier(algorithm: str, c: int) -> int:
    return {"l1": 1, "er": 2, "ssmp": c + 1}[algorithm]


def rho_alg(delta, d, n, algorithm: str, rescale: bool = False, c: int = 2) -> float:
    """Recovery transition of ``algorithm`` in {l1, ssmp, er}.

    By default this is ``rho_exp`` at the algorithm's epsilon. With
    ``rescale=True`` the result is divided by the sparsity inflation the
    recovery theorems ask for (1 for l1, 2 for ER, c + 1 for SSMP).
    """
    if algorithm not in ALGORITHM_EPS:
        raise ValueError(f"algorithm must be one of {sorted(ALGORITHM_EPS)}, got {algorithm!r}")
    rho = rho_exp(delta, d, ALGORITHM_EPS[algorithm], n)
    if rescale and 0.0 < rho < 1.0:
        rho /= _multiplier(algorithm, c)
    return rho


@dataclass(frozen=True)
class PhaseCurve:
    delta_grid: tuple[float, ...]
    rho_values: tuple[float, ...]
    statuses: tuple[str, ...]
    residuals: tuple[float, ...]
    d: int
    eps: Fraction | float
    n: int
    kind: str

    def __post_init__(self):
        g = self.delta_grid
        if any(b <= a for a, b in zip(g, g[1:])):
            raise ValueError("delta grid must be strictly increasing")
        if not len(g) == len(self.rho_values) == len(self.statuses) == len(self.residuals):
            raise ValueError("curve columns differ in length")

    @property
    def ok(self) -> tuple[bool, ...]:
        return tuple(s == OK for s in self.statuses)

    def points(self) -> list[PhasePoint]:
        return [PhasePoint(*p) for p in zip(self.delta_grid, self.rho_values,
                                             self.statuses, self.residuals)]


def phase_curve(delta_grid, d, epsilon_or_alg, n, kind: str = "exp",
                rescale: bool = False, c: int = 2, threads: int = 1) -> PhaseCurve:
    """Evaluate a transition curve over a delta grid.

    ``kind`` is ``exp`` or ``bi`` (``epsilon_or_alg`` is then epsilon) or
    ``alg`` (``epsilon_or_alg`` names the algorithm). No-root points are
    kept with their status; they do not abort the curve.
    """
    grid = tuple(float(x) for x in delta_grid)
    if kind == "alg":
        algorithm = epsilon_or_alg
        if algorithm not in ALGORITHM_EPS:
            raise ValueError(f"unknown algorithm {algorithm!r}")
        eps, root_kind = ALGORITHM_EPS[algorithm], "exp"
        label = f"alg:{algorithm}"
    elif kind in ("exp", "bi"):
        eps, root_kind, label = epsilon_or_alg, kind, kind
    else:
        raise ValueError(f"kind must be exp, bi or alg, got {kind!r}")

    def point(delta):
        p = find_transition(root_kind, delta, d, eps, n)
        if kind == "alg" and rescale and p.ok:
            p = PhasePoint(p.delta, p.rho / _multiplier(epsilon_or_alg, c), p.status, p.residual)
        return p

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            pts = list(pool.map(point, grid))
    else:
        pts = [point(x) for x in grid]
    return PhaseCurve(delta_grid=grid,
                      rho_values=tuple(p.rho for p in pts),
                      statuses=tuple(p.status for p in pts),
                      residuals=tuple(p.residual for p in pts),
                      d=d, eps=eps, n=n, kind=label)
