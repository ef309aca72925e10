"""Combinatorics of dyadic column splitting.

Split censuses, binary entropy, the two-set large-deviation exponent
``psi_n`` with its polynomial prefactor, exact intersection
probabilities and Stirling brackets for binomial coefficients.

Everything here is a pure function. Binomials are handled through a
shared log-factorial table so that paper-scale sizes (n ~ 2**20) never
overflow.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "SplitLevel",
    "PsiArgs",
    "split_census",
    "num_levels",
    "shannon_entropy",
    "psi_n",
    "pi_poly",
    "intersect_prob",
    "log_factorial",
    "log_binomial",
    "stirling_bounds",
]

# relative tolerance used to decide case equalities on real-valued input
_CASE_RTOL = 1e-12


# ---------------------------------------------------------------------------
# log-factorial table
# ---------------------------------------------------------------------------

class _LogFactorialTable:
    """Grow-only table of log(m!) shared by every caller."""

    def __init__(self, size: int = 4096):
        self._lock = threading.Lock()
        self._table = self._build(size)

    @staticmethod
    def _build(size):
        logs = np.log(np.arange(1, size, dtype=float))
        return np.concatenate(([0.0], np.cumsum(logs)))

    def __call__(self, m: int) -> float:
        table = self._table
        if m >= table.size:
            with self._lock:
                if m >= self._table.size:
                    self._table = self._build(max(2 * self._table.size, m + 1))
                table = self._table
        return float(table[m])


_LOGFACT = _LogFactorialTable()


def log_factorial(m: int) -> float:
    if m < 0:
        raise ValueError(f"log_factorial needs m >= 0, got {m}")
    if m > 1 << 24:
        return math.lgamma(m + 1.0)
    return _LOGFACT(int(m))


def log_binomial(m: int, j: int) -> float:
    """log C(m, j); ``-inf`` when j is outside [0, m]."""
    if j < 0 or j > m:
        return -math.inf
    return log_factorial(m) - log_factorial(j) - log_factorial(m - j)


# ---------------------------------------------------------------------------
# dyadic split census
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SplitLevel:
    """Census of one level of the dyadic split of an s-column set.

    At level ``j`` the set is cut into ``q`` pieces of size ``Q`` and
    ``r`` pieces of size ``R = Q - 1``.
    """

    level: int
    Q: int
    R: int
    q: int
    r: int


def num_levels(s) -> int:
    """ceil(log2 s) for integer or real s >= 1."""
    if isinstance(s, (int, np.integer)):
        if s < 1:
            raise ValueError(f"s must be >= 1, got {s}")
        return int(s - 1).bit_length()
    s = float(s)
    if not s >= 1.0:
        raise ValueError(f"s must be >= 1, got {s}")
    m, e = math.frexp(s)  # s = m * 2**e with 0.5 <= m < 1
    return e - 1 if m == 0.5 else e


def split_census(s: int, j: int) -> SplitLevel:
    if s < 2:
        raise ValueError(f"split_census needs s >= 2, got {s}")
    top = num_levels(s) - 1
    if not 0 <= j <= top:
        raise ValueError(f"level j={j} outside [0, {top}] for s={s}")
    width = 1 << j
    Q = -(-s // width)
    q = s - width * Q + width
    return SplitLevel(level=j, Q=Q, R=Q - 1, q=q, r=width - q)


# ---------------------------------------------------------------------------
# entropy and the large-deviation exponent
# ---------------------------------------------------------------------------

def shannon_entropy(p: float) -> float:
    """Binary entropy in nats, with 0 log 0 = 0."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability outside [0, 1]: {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log(p) - (1.0 - p) * math.log1p(-p)


def _clip_unit(p: float) -> float:
    # float noise at the edges of [0, 1] from real-valued chains
    if -1e-12 < p < 0.0:
        return 0.0
    if 1.0 < p < 1.0 + 1e-12:
        return 1.0
    return p


@dataclass(frozen=True)
class PsiArgs:
    """Arguments (n, x, y, z) of ``psi_n`` and ``pi_poly``.

    ``x`` is the size of a union of a ``y``-set and a ``z``-set drawn in
    ``[n]``.
    """

    n: float
    x: float
    y: float
    z: float

    def __post_init__(self):
        n, x, y, z = self.n, self.x, self.y, self.z
        if not n > 0:
            raise ValueError(f"n must be positive, got {n}")
        tol = _CASE_RTOL * max(1.0, abs(n))
        for name, v in (("x", x), ("y", y), ("z", z)):
            if not -tol <= v <= n + tol:
                raise ValueError(f"{name}={v} outside [0, n={n}]")
        if x < max(y, z) - tol or x > y + z + tol:
            raise ValueError(
                f"need max(y, z) <= x <= y + z, got x={x}, y={y}, z={z}")


def _as_args(args, n=None, x=None, y=None, z=None) -> PsiArgs:
    if isinstance(args, PsiArgs):
        return args
    if args is not None:
        return PsiArgs(*args)
    return PsiArgs(n, x, y, z)


def psi_n(args: PsiArgs | tuple | None = None, *, n=None, x=None, y=None, z=None) -> float:
    """Large-deviation exponent of ``P_n(x, y, z)``.

    ``y H((x-z)/y) + (n-y) H((x-y)/(n-y)) - n H(z/n)``; a term whose
    prefactor vanishes contributes 0. Arguments may be real.
    """
    a = _as_args(args, n, x, y, z)
    n, x, y, z = float(a.n), float(a.x), float(a.y), float(a.z)
    first = y * shannon_entropy(_clip_unit((x - z) / y)) if y > 0 else 0.0
    second = (n - y) * shannon_entropy(_clip_unit((x - y) / (n - y))) if n - y > 0 else 0.0
    return first + second - n * shannon_entropy(_clip_unit(z / n))


def _same(a, b) -> bool:
    if isinstance(a, (int, np.integer)) and isinstance(b, (int, np.integer)):
        return a == b
    return abs(a - b) <= _CASE_RTOL * max(1.0, abs(a), abs(b))


def _stirling_factor(m, j, upper: bool) -> float:
    """Polynomial factor of the Stirling bracket for C(m, j).

    Exactly 1 at the degenerate ends j in {0, m} where the binomial is 1.
    """
    if _same(j, 0) or _same(j, m):
        return 1.0
    core = 2.0 * math.pi * j * (m - j) / m
    if upper:
        return 1.25 / math.sqrt(core)
    return 0.64 / math.sqrt(core)


def pi_poly(args: PsiArgs | tuple | None = None, *, n=None, x=None, y=None, z=None) -> float:
    """Polynomial prefactor with ``P_n(x,y,z) <= pi * exp(psi_n)``.

    The four named cases (generic interior, x = y > z, x = y + z and
    x = y = z) use their closed forms. Configurations outside those
    cases (x = z > y, x = n, z in {0, n}, ...) fall back to assembling
    the same Stirling bracket factor by factor, which coincides with the
    closed forms wherever those are defined.
    """
    a = _as_args(args, n, x, y, z)
    n, x, y, z = a.n, a.x, a.y, a.z
    if n <= 0:
        raise ValueError("pi_poly needs n > 0")
    c = 1.25
    interior = 0 < z < n and 0 < y < n and not _same(x, n)
    if interior:
        if _same(x, y) and _same(y, z):
            return c**2 * math.sqrt(2.0 * math.pi * z * (n - z) / n)
        if _same(x, y) and y > z:
            return c**3 * math.sqrt(y * (n - z) / (n * (y - z)))
        if _same(x, y + z) and not _same(n, y + z):
            return c**3 * math.sqrt((n - y) * (n - z) / (n * (n - y - z)))
        if x > y and x > z and x < y + z and not (_same(x, y) or _same(x, z) or _same(x, y + z)):
            num = y * z * (n - y) * (n - z)
            den = 2.0 * math.pi * n * (y + z - x) * (x - y) * (x - z) * (n - x)
            return c**4 * math.sqrt(num / den)
    # generic factorwise assembly of the same bound
    f1 = _stirling_factor(y, y + z - x, upper=True)
    f2 = _stirling_factor(n - y, x - y, upper=True)
    f3 = 1.0 / _stirling_factor(n, z, upper=False)
    return f1 * f2 * f3


# ---------------------------------------------------------------------------
# exact two-set intersection probability
# ---------------------------------------------------------------------------

def intersect_prob(n: int, b: int, b1: int, b2: int) -> float:
    """P(|B1 u B2| = b) for independent uniform b1- and b2-subsets of [n].

    ``C(b1, b1+b2-b) C(n-b1, b-b1) / C(n, b2)``, evaluated in log space.
    """
    if min(n, b, b1, b2) < 0:
        raise ValueError("arguments must be nonnegative")
    if b1 > n or b2 > n:
        raise ValueError(f"set sizes b1={b1}, b2={b2} exceed n={n}")
    if b < max(b1, b2) or b > b1 + b2:
        raise ValueError(f"b={b} outside [max(b1,b2), b1+b2] = [{max(b1, b2)}, {b1 + b2}]")
    if b > n:
        return 0.0
    logp = (log_binomial(b1, b1 + b2 - b)
            + log_binomial(n - b1, b - b1)
            - log_binomial(n, b2))
    return math.exp(logp) if logp > -math.inf else 0.0


# ---------------------------------------------------------------------------
# Stirling brackets
# ---------------------------------------------------------------------------

def stirling_bounds(N: int, p) -> tuple[float, float]:
    """(lower, upper) bracketing C(N, Np) with constants 16/25 and 5/4."""
    p = Fraction(p)
    if not 0 < p < 1:
        raise ValueError(f"p must lie strictly inside (0, 1), got {p}")
    if (N * p).denominator != 1:
        raise ValueError(f"N*p must be an integer, got N={N}, p={p}")
    pf = float(p)
    core = math.exp(N * shannon_entropy(pf)) / math.sqrt(2.0 * math.pi * pf * (1.0 - pf) * N)
    return 0.64 * core, 1.25 * core
