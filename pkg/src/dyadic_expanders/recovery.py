"""Greedy sparse recovery with SE/SSE measurement matrices.

``er_recover`` is Expander Recovery: repeatedly pick a column whose
(sign-adjusted) gaps agree on enough of its rows and move that
coordinate by the shared gap. ``ssmp_recover`` is Sequential Sparse
Matching Pursuit: greedy 1-D l1 coordinate steps followed by hard
thresholding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .matrices import SparseBinaryMatrix, make_rng

__all__ = [
    "RecoveryProblem",
    "RecoveryResult",
    "gaps",
    "er_recover",
    "ssmp_recover",
    "best_increment",
    "hard_threshold",
    "random_sparse_vector",
    "format_vector",
    "parse_vector",
]

_REAL_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class RecoveryProblem:
    matrix: SparseBinaryMatrix
    y: np.ndarray
    k: int
    eta: float = 0.0

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        if y.shape != (self.matrix.n,):
            raise ValueError(f"y has shape {y.shape}, expected ({self.matrix.n},)")
        if not np.all(np.isfinite(y)):
            raise ValueError("y must be finite")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not self.eta >= 0:
            raise ValueError(f"eta must be nonnegative, got {self.eta}")
        y.setflags(write=False)
        object.__setattr__(self, "y", y)

    @classmethod
    def noiseless(cls, matrix: SparseBinaryMatrix, x, k: int | None = None) -> "RecoveryProblem":
        x = np.asarray(x, dtype=float)
        k = int(np.count_nonzero(x)) if k is None else k
        return cls(matrix=matrix, y=matrix.matvec(x), k=max(k, 1))


@dataclass(frozen=True, eq=False)
class RecoveryResult:
    estimate: np.ndarray
    iterations: int
    converged: bool
    residual_l1: float

    def support(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.estimate))


def gaps(matrix: SparseBinaryMatrix, x_hat, y) -> np.ndarray:
    """g = y - A x_hat."""
    y = np.asarray(y, dtype=float)
    if y.shape != (matrix.n,):
        raise ValueError(f"y has shape {y.shape}, expected ({matrix.n},)")
    return y - matrix.matvec(x_hat)


def _is_integral(a: np.ndarray) -> bool:
    return bool(np.all(a == np.round(a)))


def _solved(g: np.ndarray, y: np.ndarray, integral: bool) -> bool:
    if integral:
        return not g.any()
    return float(np.abs(g).max(initial=0.0)) <= _REAL_RTOL * max(1.0, float(np.abs(y).max(initial=0.0)))


def _modal_gap(vals: np.ndarray, integral: bool) -> tuple[float, int]:
    """Most frequent nonzero value and its multiplicity (first occurrence wins ties)."""
    vals = vals[vals != 0]
    best_v, best_c = 0.0, 0
    for v in vals:
        if integral:
            c = int(np.count_nonzero(vals == v))
        else:
            c = int(np.count_nonzero(np.isclose(vals, v, rtol=_REAL_RTOL, atol=0.0)))
        if c > best_c:
            best_v, best_c = float(v), c
    return best_v, best_c


def _er_pick(A: SparseBinaryMatrix, g: np.ndarray, need, integral: bool):
    """Lowest-index column whose modal sign-adjusted gap reaches ``need``."""
    if A.uniform:
        rows, vals = A.blocks()
        W = g[rows] * vals
        if integral:
            same = W[:, :, None] == W[:, None, :]
        else:
            same = np.isclose(W[:, :, None], W[:, None, :], rtol=_REAL_RTOL, atol=0.0)
        counts = np.where(W != 0, same.sum(axis=2), 0)
        pos = counts.argmax(axis=1)
        top = counts[np.arange(A.N), pos]
        hits = np.flatnonzero(top >= need)
        if hits.size == 0:
            return None
        j = int(hits[0])
        return j, float(W[j, pos[j]])
    for j in range(A.N):
        rows, vals = A.column(j)
        value, count = _modal_gap(g[rows] * vals, integral)
        if count >= need:
            return j, value
    return None


def er_recover(problem: RecoveryProblem, epsilon=Fraction(1, 4)) -> RecoveryResult:
    """Expander Recovery, capped at 2k coordinate updates.

    A column qualifies when at least ``(1 - 2 eps) d`` of its rows carry the
    same nonzero sign-adjusted gap ``g_i * A_ij``; the lowest-index
    qualifying column is updated by that gap.
    """
    A, y, k = problem.matrix, problem.y, problem.k
    eps = Fraction(epsilon).limit_denominator(10**9) if not isinstance(epsilon, Fraction) else epsilon
    if not 0 <= eps < Fraction(1, 2):
        raise ValueError(f"epsilon must lie in [0, 1/2), got {epsilon}")
    need = (1 - 2 * eps) * A.d
    integral = _is_integral(y)
    x_hat = np.zeros(A.N)
    g = y.copy()
    iterations = 0
    while not _solved(g, y, integral) and iterations < 2 * k:
        pick = _er_pick(A, g, need, integral)
        if pick is None:
            break  # stall: no qualifying column
        j, value = pick
        rows, vals = A.column(j)
        x_hat[j] += value
        g[rows] -= value * vals
        iterations += 1
    return RecoveryResult(estimate=x_hat, iterations=iterations,
                          converged=_solved(g, y, integral),
                          residual_l1=float(np.abs(g).sum()))


def best_increment(residual, column) -> tuple[float, float]:
    """1-D l1 minimiser z of ||residual - z * column||_1.

    ``column`` is a ``(rows, values)`` pair with values +-1. The minimiser
    is the median of ``residual[rows] * values``; for even d every point
    of the median interval is optimal and the one closest to 0 is taken.
    """
    residual = np.asarray(residual, dtype=float)
    rows, vals = column
    rows = np.asarray(rows)
    w = np.sort(residual[rows] * np.asarray(vals))
    m = w.size
    if m == 0:
        return 0.0, float(np.abs(residual).sum())
    z = float(_median_points(w[None, :])[0])
    off = np.abs(residual).sum() - np.abs(residual[rows]).sum()
    return z, float(off + np.abs(w - z).sum())


def hard_threshold(x, k: int) -> np.ndarray:
    """Keep the k largest-magnitude entries; ties go to the lower index."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    if k == 0:
        return out
    keep = np.argsort(-np.abs(x), kind="stable")[:k]
    out[keep] = x[keep]
    return out


def auto_outer_iterations(y, eta: float) -> int:
    y_l1 = float(np.abs(y).sum())
    if y_l1 == 0:
        return 1
    return max(1, math.ceil(math.log(y_l1 / max(eta, 1e-12))))


def _median_points(Ws: np.ndarray) -> np.ndarray:
    # rows of Ws are sorted; odd width -> middle, even -> point of the median interval nearest 0
    m = Ws.shape[1]
    if m % 2:
        return Ws[:, m // 2]
    return np.minimum(np.maximum(0.0, Ws[:, m // 2 - 1]), Ws[:, m // 2])


def _best_step(A: SparseBinaryMatrix, r: np.ndarray):
    """(decrease, column, z) of the best single-coordinate l1 step."""
    if A.uniform:
        rows, vals = A.blocks()
        W = np.sort(r[rows] * vals, axis=1)
        z = _median_points(W)
        dec = np.abs(W).sum(axis=1) - np.abs(W - z[:, None]).sum(axis=1)
        j = int(dec.argmax())  # first maximum: lowest index on ties
        return float(dec[j]), j, float(z[j])
    best = (0.0, -1, 0.0)
    for j in range(A.N):
        rows, vals = A.column(j)
        w = r[rows] * vals
        z, _ = best_increment(r, (rows, vals))
        dec = np.abs(w).sum() - np.abs(w - z).sum()
        if dec > best[0]:
            best = (dec, j, z)
    return best


def ssmp_recover(problem: RecoveryProblem, c: int = 2, T: int | None = None) -> RecoveryResult:
    """Sequential Sparse Matching Pursuit.

    Each of the ``T`` outer rounds runs ``(c - 1) k`` greedy coordinate
    steps (exhaustive scan, largest l1 decrease, lowest index on ties) and
    then hard-thresholds to k entries.
    """
    if int(c) != c or c < 2:
        raise ValueError(f"c must be an integer >= 2, got {c}")
    A, y, k = problem.matrix, problem.y, problem.k
    T = auto_outer_iterations(y, problem.eta) if T is None else int(T)
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    integral = _is_integral(y)
    x_hat = np.zeros(A.N)
    r = y.copy()
    steps = 0
    for _ in range(T):
        if _solved(r, y, integral):
            break
        before = x_hat.copy()
        for _ in range((int(c) - 1) * k):
            dec, j, z = _best_step(A, r)
            if j < 0 or dec <= 0:
                break
            rows, vals = A.column(j)
            x_hat[j] += z
            r[rows] -= z * vals
            steps += 1
        x_hat = hard_threshold(x_hat, k)
        r = y - A.matvec(x_hat)
        if np.array_equal(x_hat, before):
            break
    return RecoveryResult(estimate=x_hat, iterations=steps,
                          converged=_solved(r, y, integral),
                          residual_l1=float(np.abs(r).sum()))


def random_sparse_vector(N: int, k: int, seed: int, values=(-2, -1, 1, 2)) -> np.ndarray:
    """k-sparse length-N vector with uniform support and entries drawn from ``values``."""
    if not 0 <= k <= N:
        raise ValueError(f"need 0 <= k <= N, got k={k}, N={N}")
    rng = make_rng(seed)
    x = np.zeros(N)
    support = rng.choice(N, size=k, replace=False)
    x[support] = rng.choice(np.asarray(values, dtype=float), size=k)
    return x


def format_vector(x) -> str:
    """Nonzeros as ``index:value`` pairs, comma separated."""
    x = np.asarray(x, dtype=float)
    return ",".join(f"{i}:{x[i]:.17g}" for i in np.flatnonzero(x))


def parse_vector(text: str, length: int) -> np.ndarray:
    x = np.zeros(length)
    for item in text.replace("\n", ",").split(","):
        item = item.strip()
        if not item:
            continue
        i, v = item.split(":")
        i = int(i)
        if not 0 <= i < length:
            raise ValueError(f"index {i} outside [0, {length})")
        x[i] = float(v)
    return x
