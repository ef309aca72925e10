"""Random sparse expander (SE) and signed sparse expander (SSE) matrices.

Columns are stored as support lists (CSC layout: ``indptr``, ``indices``,
``data``). Generation is seeded through a counter-based Philox stream
keyed by ``(seed, *key)``, so every Monte-Carlo trial has its own
reproducible stream and trials can run in any order.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .bounds import expected_neighbors

__all__ = [
    "SparseBinaryMatrix",
    "EnsembleStats",
    "make_rng",
    "generate",
    "from_columns",
    "neighbor_count",
    "expansion",
    "is_expander_on",
    "monte_carlo_neighbors",
    "union_sizes",
    "exact_union_distribution",
    "rip1_ratio",
    "dumps",
    "loads",
    "save",
    "load",
]

# enumeration guard for exhaustive expansion checks
MAX_ENUM_COLUMNS = 24
# exactness/runtime guard for the sequential DP
MAX_DP_ROWS = 64
MAX_DP_SET = 16


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Philox stream for ``(seed, *key)``; distinct keys give independent streams."""
    if seed is None:
        raise ValueError("a seed is required")
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True, eq=False)
class SparseBinaryMatrix:
    """Column-sparse n x N matrix with (at most) d entries per column."""

    n: int
    N: int
    d: int
    signed: bool
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    seed: int | None = None
    _masks: list = field(default=None, repr=False, compare=False)
    _uniform: bool = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        for arr in (self.indptr, self.indices, self.data):
            arr.setflags(write=False)
        object.__setattr__(self, "_uniform", bool(np.all(np.diff(self.indptr) == self.d)))

    def column(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[j], self.indptr[j + 1]
        return self.indices[lo:hi], self.data[lo:hi]

    @property
    def uniform(self) -> bool:
        """True when every column holds exactly d entries."""
        return self._uniform

    def blocks(self) -> tuple[np.ndarray, np.ndarray]:
        """(N, d) views of rows and values; only for uniform matrices."""
        if not self.uniform:
            raise ValueError("matrix has columns with fewer than d entries")
        return self.indices.reshape(self.N, self.d), self.data.reshape(self.N, self.d)

    def column_masks(self) -> list[int]:
        """Row supports as Python-int bitmasks (cached)."""
        if self._masks is None:
            masks = []
            for j in range(self.N):
                m = 0
                for r in self.column(j)[0]:
                    m |= 1 << int(r)
                masks.append(m)
            object.__setattr__(self, "_masks", masks)
        return self._masks

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.N,):
            raise ValueError(f"x has shape {x.shape}, expected ({self.N},)")
        counts = np.diff(self.indptr)
        out = np.zeros(self.n)
        np.add.at(out, self.indices, self.data * np.repeat(x, counts))
        return out

    def toarray(self) -> np.ndarray:
        dense = np.zeros((self.n, self.N), dtype=np.int64)
        cols = np.repeat(np.arange(self.N), np.diff(self.indptr))
        dense[self.indices, cols] = self.data
        return dense

    def __eq__(self, other):
        if not isinstance(other, SparseBinaryMatrix):
            return NotImplemented
        return (
            (self.n, self.N, self.d, self.signed, self.seed)
            == (other.n, other.N, other.d, other.signed, other.seed)
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.data, other.data)
        )

    __hash__ = None


def _floyd_supports(rng: np.random.Generator, n: int, N: int, d: int) -> np.ndarray:
    """N independent uniform d-subsets of range(n) via Floyd's algorithm."""
    chosen = np.empty((N, d), dtype=np.int64)
    for idx, j in enumerate(range(n - d, n)):
        t = rng.integers(0, j + 1, size=N)
        dup = (chosen[:, :idx] == t[:, None]).any(axis=1)
        chosen[:, idx] = np.where(dup, j, t)
    chosen.sort(axis=1)
    return chosen


def generate(n: int, N: int, d: int, signed: bool = False, seed: int = 0,
             *, with_replacement: bool = False, key: tuple = ()) -> SparseBinaryMatrix:
    """Draw an SE (``signed=False``) or SSE matrix.

    Each column support is a uniform d-subset of the rows. With
    ``with_replacement=True`` the d row indices are drawn independently
    and repeats collapse, so a column can hold fewer than d entries.
    """
    if n < 1 or N < 1 or d < 1:
        raise ValueError(f"n, N, d must be positive, got n={n}, N={N}, d={d}")
    if d > n:
        raise ValueError(f"d={d} exceeds n={n}")
    rng = make_rng(seed, *key)
    if with_replacement:
        raw = np.sort(rng.integers(0, n, size=(N, d)), axis=1)
        cols = [np.unique(row) for row in raw]
        indptr = np.concatenate(([0], np.cumsum([c.size for c in cols]))).astype(np.int64)
        indices = np.concatenate(cols).astype(np.int64)
    else:
        indices = _floyd_supports(rng, n, N, d).ravel()
        indptr = np.arange(N + 1, dtype=np.int64) * d
    if signed:
        data = (2 * rng.integers(0, 2, size=indices.size) - 1).astype(np.int64)
    else:
        data = np.ones(indices.size, dtype=np.int64)
    return SparseBinaryMatrix(n=n, N=N, d=d, signed=signed, indptr=indptr,
                              indices=indices, data=data, seed=seed)


def from_columns(n: int, d: int, columns, signed: bool | None = None,
                 seed: int | None = None) -> SparseBinaryMatrix:
    """Build a matrix from explicit columns.

    ``columns`` holds, per column, either a row list (values 1) or a list
    of ``(row, value)`` pairs.
    """
    indptr, indices, data = [0], [], []
    for col in columns:
        pairs = [(int(e), 1) if np.isscalar(e) else (int(e[0]), int(e[1])) for e in col]
        pairs.sort()
        rows = [r for r, _ in pairs]
        if len(set(rows)) != len(rows):
            raise ValueError(f"repeated row index in column {len(indptr) - 1}")
        if len(rows) > d:
            raise ValueError(f"column {len(indptr) - 1} has more than d={d} entries")
        if any(not 0 <= r < n for r in rows):
            raise ValueError(f"row index out of range in column {len(indptr) - 1}")
        if any(v not in (-1, 1) for _, v in pairs):
            raise ValueError("entries must be +1 or -1")
        indices.extend(rows)
        data.extend(v for _, v in pairs)
        indptr.append(len(indices))
    data_arr = np.asarray(data, dtype=np.int64)
    if signed is None:
        signed = bool((data_arr < 0).any())
    if not signed and (data_arr < 0).any():
        raise ValueError("an SE matrix cannot hold -1 entries")
    return SparseBinaryMatrix(
        n=n, N=len(indptr) - 1, d=d, signed=signed,
        indptr=np.asarray(indptr, dtype=np.int64),
        indices=np.asarray(indices, dtype=np.int64),
        data=data_arr, seed=seed)


# ---------------------------------------------------------------------------
# neighbour sets and expansion
# ---------------------------------------------------------------------------

def _check_columns(matrix: SparseBinaryMatrix, S) -> list[int]:
    cols = [int(j) for j in S]
    bad = [j for j in cols if not 0 <= j < matrix.N]
    if bad:
        raise IndexError(f"column indices {bad} outside [0, {matrix.N})")
    return cols


def neighbor_count(matrix: SparseBinaryMatrix, S) -> int:
    """|A_S|: number of rows with a nonzero in some column of S."""
    cols = _check_columns(matrix, S)
    seen = np.zeros(matrix.n, dtype=bool)
    for j in cols:
        seen[matrix.column(j)[0]] = True
    return int(seen.sum())


def expansion(matrix: SparseBinaryMatrix, S) -> float:
    cols = set(_check_columns(matrix, S))
    if not cols:
        raise ValueError("expansion of an empty set is undefined")
    return neighbor_count(matrix, cols) / len(cols)


def is_expander_on(matrix: SparseBinaryMatrix, k: int, epsilon) -> bool:
    """Exhaustively check |Gamma(X)| >= (1 - eps) d |X| for every |X| <= k."""
    if matrix.N > MAX_ENUM_COLUMNS:
        raise ValueError(
            f"exhaustive check refused for N={matrix.N} > {MAX_ENUM_COLUMNS}")
    eps = Fraction(epsilon).limit_denominator(10**9) if not isinstance(epsilon, Fraction) else epsilon
    masks = matrix.column_masks()
    need = (1 - eps) * matrix.d
    for size in range(1, min(k, matrix.N) + 1):
        floor = need * size
        for combo in itertools.combinations(masks, size):
            union = 0
            for m in combo:
                union |= m
            if union.bit_count() < floor:
                return False
    return True


# ---------------------------------------------------------------------------
# Monte Carlo ensemble
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EnsembleStats:
    """Per-set-size Monte-Carlo statistics of |A_k|."""

    ks: np.ndarray
    trials: int
    mean: np.ndarray
    std: np.ndarray
    min: np.ndarray
    max: np.ndarray
    expected: np.ndarray
    seed: int

    @property
    def rel_error(self) -> np.ndarray:
        return np.abs(self.mean - self.expected) / self.expected


def union_sizes(matrix: SparseBinaryMatrix) -> np.ndarray:
    """|A_k| for the nested sets {0..k-1}, k = 1..N."""
    first = np.full(matrix.n, matrix.N, dtype=np.int64)
    cols = np.repeat(np.arange(matrix.N), np.diff(matrix.indptr))
    np.minimum.at(first, matrix.indices, cols)
    new_rows = np.bincount(first[first < matrix.N], minlength=matrix.N)
    return np.cumsum(new_rows)


def _trial_sizes(n, d, kmax, seed, trial):
    return union_sizes(generate(n, kmax, d, seed=seed, key=(trial,)))


def monte_carlo_neighbors(n: int, d: int, k_grid, trials: int, seed: int,
                          threads: int = 1) -> EnsembleStats:
    """Statistics of |A_k| over ``trials`` fresh matrices.

    Trial ``t`` draws an n x max(k) matrix from stream ``(seed, t)`` and
    uses the nested column sets {0..k-1}.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    ks = np.asarray(sorted(set(int(k) for k in k_grid)), dtype=np.int64)
    if ks.size == 0 or ks[0] < 1:
        raise ValueError("k_grid must hold positive set sizes")
    kmax = int(ks[-1])
    if d > n:
        raise ValueError(f"d={d} exceeds n={n}")

    def run(t):
        return _trial_sizes(n, d, kmax, seed, t)[ks - 1]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(run, range(trials)))
    else:
        rows = [run(t) for t in range(trials)]
    sizes = np.vstack(rows)  # integer counts: sums below are exact
    total = sizes.sum(axis=0)
    mean = total / trials
    if trials > 1:
        centred = sizes - mean
        std = np.sqrt((centred * centred).sum(axis=0) / (trials - 1))
    else:
        std = np.zeros(ks.size)
    expected = np.array([expected_neighbors(n, d, int(k)) for k in ks])
    return EnsembleStats(ks=ks, trials=trials, mean=mean, std=std,
                         min=sizes.min(axis=0), max=sizes.max(axis=0),
                         expected=expected, seed=seed)


# ---------------------------------------------------------------------------
# exact small-instance distribution
# ---------------------------------------------------------------------------

def exact_union_distribution(n: int, d: int, s: int, exact: bool = False) -> dict:
    """Exact pmf of |A_s| for s independent uniform d-subsets of [n].

    Columns are added one at a time; a new column with ``m`` fresh rows
    moves the union from ``b`` to ``b + m`` with probability
    ``C(n-b, m) C(b, d-m) / C(n, d)``. Arithmetic is over rationals.
    """
    if n > MAX_DP_ROWS or s > MAX_DP_SET:
        raise ValueError(f"exact DP limited to n <= {MAX_DP_ROWS}, s <= {MAX_DP_SET}")
    if not 1 <= d <= n or s < 1:
        raise ValueError(f"need 1 <= d <= n and s >= 1, got n={n}, d={d}, s={s}")
    total = math.comb(n, d)
    pmf = {d: Fraction(1)}
    for _ in range(s - 1):
        nxt: dict[int, Fraction] = {}
        for b, p in pmf.items():
            for fresh in range(max(0, d - b), min(d, n - b) + 1):
                w = math.comb(n - b, fresh) * math.comb(b, d - fresh)
                if w:
                    nxt[b + fresh] = nxt.get(b + fresh, 0) + p * Fraction(w, total)
        pmf = nxt
    pmf = dict(sorted(pmf.items()))
    if exact:
        return pmf
    return {b: float(p) for b, p in pmf.items()}


# ---------------------------------------------------------------------------
# RIP-1
# ---------------------------------------------------------------------------

def rip1_ratio(matrix: SparseBinaryMatrix, x) -> float:
    """||A x||_1 / (d ||x||_1)."""
    x = np.asarray(x, dtype=float)
    norm = np.abs(x).sum()
    if not np.isfinite(norm):
        raise ValueError("x must be finite")
    if norm == 0:
        raise ValueError("rip1_ratio of the zero vector is undefined")
    return float(np.abs(matrix.matvec(x)).sum() / (matrix.d * norm))


# ---------------------------------------------------------------------------
# plain-text format
# ---------------------------------------------------------------------------

def dumps(matrix: SparseBinaryMatrix) -> str:
    """``n N d signed seed`` header, then one ``row:value,...`` line per column."""
    seed = "none" if matrix.seed is None else str(int(matrix.seed))
    lines = [f"{matrix.n} {matrix.N} {matrix.d} {int(matrix.signed)} {seed}"]
    for j in range(matrix.N):
        rows, vals = matrix.column(j)
        lines.append(",".join(f"{int(r)}:{int(v)}" for r, v in zip(rows, vals)))
    return "\n".join(lines) + "\n"


def loads(text: str) -> SparseBinaryMatrix:
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty matrix file")
    head = lines[0].split()
    if len(head) != 5:
        raise ValueError(f"bad header line: {lines[0]!r}")
    n, N, d = (int(v) for v in head[:3])
    if head[3] not in ("0", "1"):
        raise ValueError(f"signed flag must be 0 or 1, got {head[3]!r}")
    signed = head[3] == "1"
    seed = None if head[4] == "none" else int(head[4])
    body = lines[1:]
    if len(body) != N:
        raise ValueError(f"header announces {N} columns, file has {len(body)}")
    columns = []
    for line in body:
        entries = [e for e in line.strip().split(",") if e]
        columns.append([tuple(int(p) for p in e.split(":")) for e in entries])
    matrix = from_columns(n, d, columns, signed=signed, seed=seed)
    if d > n:
        raise ValueError(f"d={d} exceeds n={n}")
    return matrix


def save(matrix: SparseBinaryMatrix, path) -> None:
    Path(path).write_text(dumps(matrix))


def load(path) -> SparseBinaryMatrix:
    return loads(Path(path).read_text())
