"""Scan seeds for small SE matrices that are certified lossless expanders.

Writes one seed per line. The recovery and RIP-1 acceptance tests load
this list and re-run the exhaustive certification on every entry, so
the file is a search cache rather than a source of truth.

    python3 scripts/certified_corpus.py --count 100 --out tests/data/certified_seeds.txt
"""

import argparse
from fractions import Fraction

import numpy as np

from dyadic_expanders.matrices import generate, is_expander_on


def pair_overlap_ok(matrix, max_shared):
    rows, _ = matrix.blocks()
    B = np.zeros((matrix.N, matrix.n), dtype=np.int64)
    np.put_along_axis(B, rows, 1, axis=1)
    G = B @ B.T
    np.fill_diagonal(G, 0)
    return G.max() <= max_shared


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=24)
    ap.add_argument("--N", type=int, default=12)
    ap.add_argument("--d", type=int, default=4)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--eps", type=Fraction, default=Fraction(1, 5))
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--start", type=int, default=0)
    ap.add_argument("--out", default="certified_seeds.txt")
    args = ap.parse_args()

    # a pair of columns may share at most 2d - ceil((1 - eps) * 2d) rows
    need_pair = -(-(1 - args.eps) * 2 * args.d // 1)
    max_shared = 2 * args.d - int(need_pair)
    found = []
    seed = args.start
    while len(found) < args.count:
        A = generate(args.n, args.N, args.d, seed=seed)
        if pair_overlap_ok(A, max_shared) and is_expander_on(A, args.k, args.eps):
            found.append(seed)
            print(f"seed {seed} ({len(found)}/{args.count})", flush=True)
        seed += 1
    with open(args.out, "w") as fh:
        fh.write(f"# n={args.n} N={args.N} d={args.d} k={args.k} eps={args.eps}\n")
        fh.writelines(f"{s}\n" for s in found)
    print(f"scanned {seed - args.start} seeds, kept {len(found)}")


if __name__ == "__main__":
    main()
