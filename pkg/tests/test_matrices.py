import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dyadic_expanders.bounds import expected_neighbors, tail_bound
from dyadic_expanders.matrices import (
    dumps, exact_union_distribution, expansion, from_columns, generate, is_expander_on,
    load, loads, monte_carlo_neighbors, neighbor_count, rip1_ratio, save, union_sizes,
)


def test_generate_invariants_small():
    A = generate(4, 3, 2, seed=11)
    for j in range(3):
        rows, vals = A.column(j)
        assert len(rows) == 2 and len(set(rows)) == 2
        assert list(rows) == sorted(rows)
        assert (vals == 1).all()


def test_generate_full_support():
    A = generate(4, 3, 4, seed=0)
    for j in range(3):
        assert list(A.column(j)[0]) == [0, 1, 2, 3]


def test_generate_rejects_d_above_n():
    with pytest.raises(ValueError):
        generate(8, 3, 9, seed=0)


@given(st.integers(1, 60), st.integers(1, 40), st.data(), st.booleans(), st.integers(0, 2**32))
@settings(max_examples=50)
def test_generate_deterministic_and_valid(n, N, data, signed, seed):
    d = data.draw(st.integers(1, n))
    A = generate(n, N, d, signed=signed, seed=seed)
    assert A == generate(n, N, d, signed=signed, seed=seed)
    rows, vals = A.blocks()
    assert rows.shape == (N, d)
    assert ((rows >= 0) & (rows < n)).all()
    assert (np.diff(rows, axis=1) > 0).all()
    assert set(np.unique(vals)) <= ({-1, 1} if signed else {1})


def test_signs_do_not_change_supports():
    a = generate(50, 30, 5, signed=False, seed=4)
    b = generate(50, 30, 5, signed=True, seed=4)
    assert np.array_equal(a.indices, b.indices)
    assert (b.data == -1).any()


def test_support_uniformity():
    # every 2-subset of 6 rows should appear with frequency 1/15
    N = 100_000
    A = generate(6, N, 2, seed=2024)
    rows, _ = A.blocks()
    codes = rows[:, 0] * 6 + rows[:, 1]
    counts = np.bincount(codes, minlength=36)
    pairs = [a * 6 + b for a, b in itertools.combinations(range(6), 2)]
    p = 1 / 15
    sigma = math.sqrt(N * p * (1 - p))
    for c in pairs:
        assert abs(counts[c] - N * p) <= 3 * sigma
    assert counts.sum() == counts[pairs].sum()


def test_with_replacement_mode():
    A = generate(5, 200, 4, seed=1, with_replacement=True)
    sizes = np.diff(A.indptr)
    assert sizes.max() <= 4 and sizes.min() >= 1
    assert (sizes < 4).any()
    assert not A.uniform


def test_neighbor_count_examples():
    A = from_columns(10, 3, [[0, 1, 2], [0, 1, 2], [5, 6, 7]])
    assert neighbor_count(A, [0]) == 3
    assert neighbor_count(A, [0, 1]) == 3
    assert neighbor_count(A, [0, 2]) == 6
    assert expansion(A, [0, 2]) == 3
    assert expansion(A, [1]) == 3
    with pytest.raises(IndexError):
        neighbor_count(A, [3])
    with pytest.raises(ValueError):
        expansion(A, [])


def test_union_sizes_match_neighbor_count():
    A = generate(64, 40, 5, seed=9)
    sizes = union_sizes(A)
    for k in range(1, 41):
        assert sizes[k - 1] == neighbor_count(A, range(k))


def test_from_columns_validation():
    with pytest.raises(ValueError):
        from_columns(5, 2, [[0, 0]])
    with pytest.raises(ValueError):
        from_columns(5, 2, [[0, 7]])
    with pytest.raises(ValueError):
        from_columns(5, 2, [[(0, 1), (1, 2)]])
    with pytest.raises(ValueError):
        from_columns(5, 2, [[(0, 1), (1, -1)]], signed=False)


def _brute_force_expander(A, k, eps):
    supports = [set(A.column(j)[0].tolist()) for j in range(A.N)]
    for size in range(1, k + 1):
        for X in itertools.combinations(range(A.N), size):
            if len(set().union(*(supports[j] for j in X))) < (1 - eps) * A.d * size:
                return False
    return True


def test_is_expander_trivial_cases():
    one = from_columns(6, 3, [[0, 1, 2]])
    assert is_expander_on(one, 1, 0)
    twin = from_columns(6, 3, [[0, 1, 2], [0, 1, 2]])
    assert not is_expander_on(twin, 2, Fraction(1, 3))
    with pytest.raises(ValueError):
        is_expander_on(generate(30, 25, 3, seed=0), 2, 0.25)


def test_is_expander_matches_brute_force():
    for seed in range(40):
        A = generate(24, 12, 4, seed=seed)
        assert is_expander_on(A, 3, Fraction(1, 4)) == _brute_force_expander(A, 3, Fraction(1, 4))
    for seed in range(40):
        A = generate(24, 12, 4, seed=seed)
        assert is_expander_on(A, 2, 0.25) == _brute_force_expander(A, 2, 0.25)


def test_monte_carlo_k1_exact():
    st_ = monte_carlo_neighbors(100, 7, [1], trials=20, seed=3)
    assert st_.mean[0] == 7 and st_.std[0] == 0
    assert st_.min[0] == st_.max[0] == 7


def test_monte_carlo_deterministic_and_thread_invariant():
    a = monte_carlo_neighbors(256, 4, [1, 5, 20], trials=40, seed=5)
    b = monte_carlo_neighbors(256, 4, [20, 5, 1], trials=40, seed=5, threads=4)
    for f in ("ks", "mean", "std", "min", "max", "expected"):
        assert np.array_equal(getattr(a, f), getattr(b, f))
    assert (a.min <= a.mean).all() and (a.mean <= a.max).all()


def test_monte_carlo_matches_dp_mean():
    trials = 100_000
    st_ = monte_carlo_neighbors(16, 2, [3], trials=trials, seed=8)
    pmf = exact_union_distribution(16, 2, 3, exact=True)
    mean = sum(b * p for b, p in pmf.items())
    var = sum(b * b * p for b, p in pmf.items()) - mean**2
    assert abs(st_.mean[0] - float(mean)) <= 3 * math.sqrt(float(var) / trials)


def test_monte_carlo_convergence_rate():
    # z-scores against the closed form stay at Monte-Carlo scale
    st_ = monte_carlo_neighbors(1024, 8, range(10, 501, 10), trials=500, seed=1)
    se = st_.std / math.sqrt(st_.trials)
    z = (st_.mean - st_.expected) / se
    assert np.abs(z).max() < 4.5
    assert np.sqrt(np.mean(z**2)) < 2


def test_exact_distribution_example():
    pmf = exact_union_distribution(4, 2, 2, exact=True)
    assert pmf == {2: Fraction(1, 6), 3: Fraction(4, 6), 4: Fraction(1, 6)}
    assert sum(b * p for b, p in pmf.items()) == 3


def _enumerate_union(n, d, s):
    subsets = list(itertools.combinations(range(n), d))
    counts = {}
    for combo in itertools.product(subsets, repeat=s):
        b = len(set().union(*combo))
        counts[b] = counts.get(b, 0) + 1
    total = len(subsets) ** s
    return {b: Fraction(c, total) for b, c in sorted(counts.items())}


@pytest.mark.parametrize("n,d,s", [(6, 2, 3), (5, 3, 2), (6, 3, 3), (4, 1, 3)])
def test_exact_distribution_matches_enumeration(n, d, s):
    assert exact_union_distribution(n, d, s, exact=True) == _enumerate_union(n, d, s)


@given(st.integers(1, 64), st.data())
@settings(max_examples=40, deadline=None)
def test_exact_distribution_normalised_with_closed_form_mean(n, data):
    d = data.draw(st.integers(1, min(n, 8)))
    s = data.draw(st.integers(1, 16))
    pmf = exact_union_distribution(n, d, s)
    assert abs(math.fsum(pmf.values()) - 1) < 1e-12
    mean = math.fsum(b * p for b, p in pmf.items())
    assert abs(mean - expected_neighbors(n, d, s)) < 1e-10
    assert min(pmf) >= d and max(pmf) <= min(d * s, n)


def test_exact_distribution_guards():
    with pytest.raises(ValueError):
        exact_union_distribution(65, 2, 2)
    with pytest.raises(ValueError):
        exact_union_distribution(20, 2, 17)


def test_empirical_tail_below_bound():
    n, d, s, trials = 24, 4, 6, 20_000
    A_sizes = np.array([union_sizes(generate(n, s, d, seed=77, key=(t,)))[-1]
                        for t in range(trials)])
    for a in range(d, min(d * s, n) + 1):
        freq = np.mean(A_sizes <= a)
        assert freq <= tail_bound(n, d, s, a)


def test_rip1_ratio_examples():
    A = generate(40, 20, 4, seed=1)
    x = np.abs(np.random.default_rng(0).normal(size=20))
    assert rip1_ratio(A, x) == pytest.approx(1.0, abs=1e-14)
    B = from_columns(12, 3, [[(0, 1), (1, -1), (2, 1)], [(3, 1), (4, 1), (5, -1)]])
    assert rip1_ratio(B, [2.0, -5.0]) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(ValueError):
        rip1_ratio(A, np.zeros(20))


@given(st.integers(1, 30), st.integers(1, 30), st.data(), st.booleans(),
       st.one_of(st.none(), st.integers(0, 2**40)))
@settings(max_examples=50)
def test_text_round_trip(n, N, data, signed, seed):
    d = data.draw(st.integers(1, n))
    A = generate(n, N, d, signed=signed, seed=seed or 0)
    if seed is None:
        A = from_columns(n, d, [list(zip(*A.column(j))) for j in range(N)], signed=signed)
    text = dumps(A)
    B = loads(text)
    assert B == A
    assert dumps(B) == text


def test_file_round_trip(tmp_path):
    A = generate(1024, 300, 8, signed=True, seed=7)
    save(A, tmp_path / "A.txt")
    assert load(tmp_path / "A.txt") == A


@pytest.mark.parametrize("text", ["", "4 2 2 0\n0:1,1:1\n", "4 2 2 0 1\n0:1,1:1\n",
                                  "4 1 2 2 1\n0:1,1:1\n", "4 1 2 0 1\n0:1,9:1\n"])
def test_loads_rejects_malformed(text):
    with pytest.raises(ValueError):
        loads(text)
