"""Tail bounds on the size of a union of random column supports.

The set of neighbours ``A_s`` of ``s`` columns is bounded through its
dyadic chain ``a_1 = d, a_2, a_4, ..., a_{2^(L-1)}, a_s`` with
``L = ceil(log2 s)``. Without a constraint the chain sits at its expected
values; with ``a_s`` pinned below the mean, the interior entries solve
the cubic stationarity system

    a_{2i}^3 - 2 a_i a_{2i}^2 + 2 a_i^2 a_{2i} - a_i^2 a_{4i} = 0,

which we solve by shooting on ``a_2`` and bisecting on the top value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .splitmodel import num_levels, psi_n, shannon_entropy

__all__ = [
    "NeighborChain",
    "ExpanderParams",
    "ChainSolveError",
    "RegimeError",
    "expected_neighbors",
    "expected_chain",
    "solve_constrained_chain",
    "chain_for",
    "cubic_residuals",
    "big_psi",
    "p_max",
    "tail_bound",
    "rip1_tail_bound",
    "psi_net",
    "p_prime_max",
]

_BISECT_RTOL = 1e-10
_MAX_BISECT = 200
# accepted top mismatch once a_2 is resolved to a few ulp (deep chains
# amplify the last bit of a_2 through every cubic step)
_COLLAPSE_RTOL = 1e-6


class ChainSolveError(ValueError):
    """The constrained chain has no solution bracketed by the shooting range."""


class RegimeError(ValueError):
    """Parameters fall outside the regime the union bound was derived for."""


@dataclass(frozen=True)
class NeighborChain:
    """Neighbour-set sizes along the dyadic chain.

    ``values[j]`` is ``a_{2^j}`` for ``j < L`` and ``values[L]`` is the
    top entry ``a_s``. ``s`` may be real when the chain is evaluated at a
    continuous sparsity.
    """

    n: int
    d: int
    s: float
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != num_levels(self.s) + 1:
            raise ValueError(
                f"chain for s={self.s} needs {num_levels(self.s) + 1} entries, "
                f"got {len(self.values)}")

    @property
    def indices(self) -> tuple[float, ...]:
        L = len(self.values) - 1
        return tuple(float(1 << j) for j in range(L)) + (self.s,)

    @property
    def top(self) -> float:
        return self.values[-1]

    def check(self, rtol: float = 1e-9) -> None:
        """Raise if the chain breaks a_1 = d, monotonicity, or the [d, n] range."""
        vals = self.values
        tol = rtol * self.n
        if vals[0] != self.d:
            raise ValueError(f"a_1 must equal d={self.d}, got {vals[0]}")
        for lo, hi in zip(vals, vals[1:]):
            if hi < lo - tol or hi > min(2 * lo, self.n) + tol:
                raise ValueError(f"chain not monotone within [a_i, min(2a_i, n)]: {vals}")
        if min(vals) < self.d - tol or max(vals) > self.n + tol:
            raise ValueError(f"chain leaves [d, n]: {vals}")


@dataclass(frozen=True)
class ExpanderParams:
    """Lossless-expander parameters (k, n, N, d, eps)."""

    k: float
    n: int
    N: float
    d: int
    eps: float

    def __post_init__(self):
        if not (self.k >= 1 and self.n >= 1 and self.N >= 1 and self.d >= 1):
            raise ValueError(f"k, n, N, d must be positive: {self}")
        if self.d > self.n:
            raise ValueError(f"d={self.d} exceeds n={self.n}")
        if self.k > self.N:
            raise ValueError(f"k={self.k} exceeds N={self.N}")
        if not 0.0 < self.eps < 0.5:
            raise ValueError(f"eps must lie in (0, 1/2), got {self.eps}")


def _validate(n, d, s):
    if n < 1 or d < 1:
        raise ValueError(f"n and d must be positive, got n={n}, d={d}")
    if d > n:
        raise ValueError(f"d={d} exceeds n={n}")
    if not s >= 1:
        raise ValueError(f"s must be >= 1, got {s}")


# ---------------------------------------------------------------------------
# expected chain
# ---------------------------------------------------------------------------

def expected_neighbors(n, d, s) -> float:
    """E|A_s| = n (1 - (1 - d/n)^s)."""
    _validate(n, d, s)
    if d == n:
        return float(n)
    return -n * math.expm1(s * math.log1p(-d / n))


def expected_chain(n, d, s) -> NeighborChain:
    _validate(n, d, s)
    if s < 2:
        raise ValueError(f"chain needs s >= 2, got {s}")
    L = num_levels(s)
    vals = [float(d)] + [expected_neighbors(n, d, 1 << j) for j in range(1, L)]
    vals.append(expected_neighbors(n, d, s))
    vals[0] = d
    return NeighborChain(n=n, d=d, s=s, values=tuple(vals))


# ---------------------------------------------------------------------------
# constrained chain
# ---------------------------------------------------------------------------

def _next_entry(u: float, v: float) -> float:
    # cubic solved for a_{4i}: v (v^2 - 2uv + 2u^2) / u^2
    t = v / u
    return v * ((t - 1.0) ** 2 + 1.0)


def _shoot(d: float, a2: float, steps: int, n: float) -> list[float] | None:
    """Forward-propagate the cubic from (d, a2); None once it leaves [d, n]."""
    chain = [float(d), a2]
    for _ in range(steps):
        w = _next_entry(chain[-2], chain[-1])
        if w > n or w < d:
            return None
        chain.append(w)
    return chain


def solve_constrained_chain(n, d, s, a_s) -> NeighborChain:
    """Chain with top pinned at ``a_s`` solving the cubic stationarity system.

    The free variable ``a_2`` is bisected over ``[d, min(2d, n)]``; the top
    of the forward-propagated chain is increasing in ``a_2``, equals ``d`` at
    the lower end and ``d * 2^L`` (disjoint supports) at the upper end.
    Shots that leave ``[d, n]`` count as overshoots.
    """
    _validate(n, d, s)
    if s < 2:
        raise ValueError(f"chain needs s >= 2, got {s}")
    upper = min(d * s, n)
    tol = 1e-12 * upper
    if a_s < d - tol:
        raise ChainSolveError(f"a_s={a_s} below d={d}: infeasible")
    if a_s > upper + tol:
        raise ChainSolveError(f"a_s={a_s} exceeds min(ds, n)={upper}: infeasible")
    L = num_levels(s)
    if L == 1:
        return NeighborChain(n=n, d=d, s=s, values=(d, float(a_s)))

    steps = L - 1  # cubic applications from (a_1, a_2) up to the top entry
    lo, hi = float(d), float(min(2 * d, n))
    hi_chain = _shoot(d, hi, steps, n)
    if hi_chain is not None and hi_chain[-1] < a_s - tol:
        raise ChainSolveError(f"shooting range does not bracket a_s={a_s}")

    target_tol = _BISECT_RTOL * max(a_s, 1.0)
    # the bracket ends are closed-form chains: all d, or d * 2^j
    for end_chain in (_shoot(d, lo, steps, n), hi_chain):
        if end_chain is not None and abs(end_chain[-1] - a_s) <= tol:
            vals = end_chain[:-1] + [float(a_s)]
            vals[0] = d
            return NeighborChain(n=n, d=d, s=s, values=tuple(vals))
    best = None
    for _ in range(_MAX_BISECT):
        mid = 0.5 * (lo + hi)
        chain = _shoot(d, mid, steps, n)
        if chain is None or chain[-1] > a_s:
            hi = mid
        else:
            lo = mid
        if chain is not None and (best is None or abs(chain[-1] - a_s) < abs(best[-1] - a_s)):
            best = chain
        if best is not None and abs(best[-1] - a_s) <= target_tol:
            break
        if hi - lo <= 4 * math.ulp(hi):
            break
    if best is None or abs(best[-1] - a_s) > _COLLAPSE_RTOL * max(a_s, 1.0):
        raise ChainSolveError(f"bisection failed to reach a_s={a_s}")
    vals = best[:-1] + [float(a_s)]
    vals[0] = d
    return NeighborChain(n=n, d=d, s=s, values=tuple(vals))


def chain_for(n, d, s, a_s) -> NeighborChain:
    """Constrained chain when ``a_s`` is below its mean, else the expected chain."""
    if a_s < expected_neighbors(n, d, s):
        return solve_constrained_chain(n, d, s, a_s)
    return expected_chain(n, d, s)


def cubic_residuals(chain: NeighborChain) -> list[float]:
    """Residuals of the cubic at every interior triple (a_i, a_2i, a_4i)."""
    v = chain.values
    return [b**3 - 2 * a * b * b + 2 * a * a * b - a * a * c
            for a, b, c in zip(v, v[1:], v[2:])]


# ---------------------------------------------------------------------------
# exponent and prefactors
# ---------------------------------------------------------------------------

def _exponent_sum(chain: NeighborChain) -> float:
    s, n, v = chain.s, chain.n, chain.values
    total = 0.0
    for j in range(len(v) - 1):
        weight = s / (2.0 * (1 << j))
        total += weight * psi_n(n=n, x=v[j + 1], y=v[j], z=v[j])
    return total


def big_psi(n, d, s, chain: NeighborChain) -> float:
    """Per-row exponent: (1/n) [sum_i (s/2i) psi_n(a_2i, a_i, a_i) + 3 s log(5d)]."""
    if chain.n != n or chain.d != d or chain.s != s:
        raise ValueError(
            f"chain built for (n={chain.n}, d={chain.d}, s={chain.s}), "
            f"asked for (n={n}, d={d}, s={s})")
    return (_exponent_sum(chain) + 3.0 * s * math.log(5.0 * d)) / n


def p_max(s, d) -> float:
    if s < 1 or d < 1:
        raise ValueError(f"p_max needs s, d >= 1, got s={s}, d={d}")
    return 2.0 / (25.0 * math.sqrt(2.0 * math.pi * s**3 * d**3))


def tail_bound(n, d, s, a_s) -> float:
    """Upper bound on Prob(|A_s| <= a_s). Values above 1 are returned as is."""
    _validate(n, d, s)
    upper = min(d * s, n)
    if a_s < d or a_s > upper + 1e-12 * n:
        raise ValueError(f"a_s={a_s} outside [d, min(ds, n)] = [{d}, {upper}]")
    chain = chain_for(n, d, s, a_s)
    return p_max(s, d) * math.exp(n * big_psi(n, d, s, chain))


def _eps_chain(n, d, s, eps) -> NeighborChain:
    a_s = (1.0 - eps) * d * s
    if a_s > n:
        raise RegimeError(f"(1-eps) d s = {a_s} exceeds n = {n}")
    return chain_for(n, d, s, a_s)


def rip1_tail_bound(params: ExpanderParams, s=None) -> float:
    """Bound on Prob(||A_S x||_1 <= (1 - 2 eps) d ||x||_1) for |S| = s."""
    s = params.k if s is None else s
    n, d, eps = params.n, params.d, params.eps
    if (1.0 - eps) * d * s < d:
        raise RegimeError("(1-eps) d s falls below d")
    chain = _eps_chain(n, d, s, eps)
    return p_max(s, d) * math.exp(n * big_psi(n, d, s, chain))


def psi_net(params: ExpanderParams) -> float:
    """H(k/N) + (n/N) Psi(k, d, eps); negative means the union bound decays."""
    k, n, N, d, eps = params.k, params.n, params.N, params.d, params.eps
    if k > N / 2:
        raise RegimeError(f"psi_net needs k <= N/2, got k={k}, N={N}")
    if k < 2:
        raise RegimeError(f"psi_net needs k >= 2, got k={k}")
    chain = _eps_chain(n, d, k, eps)
    return shannon_entropy(k / N) + (n / N) * big_psi(n, d, k, chain)


def p_prime_max(N, k, d) -> float:
    if k >= N:
        raise ValueError(f"p_prime_max needs k < N, got k={k}, N={N}")
    return 1.0 / (16.0 * math.pi * k * math.sqrt(d**3 * (1.0 - k / N)))
