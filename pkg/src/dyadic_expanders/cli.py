"""Command-line front end.

Subcommands write CSV (17 significant digits) whose first line is a
``#`` comment recording the version and the full invocation.

    python3 -m dyadic_expanders gen --n 1024 --N 4096 --d 8 --seed 7 --out A.txt
    python3 -m dyadic_expanders neighbor-stats --n 1024 --d 8 --kmax 500 --trials 500 --seed 1
    python3 -m dyadic_expanders bound --n 1024 --d 8 --s 16
    python3 -m dyadic_expanders phase --kind exp --d 8 --eps 1/4 --n 1024
    python3 -m dyadic_expanders recover --alg er --n 24 --N 12 --d 4 --k 2 --seed 3
"""

from __future__ import annotations

import argparse
import csv
import io
import shlex
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .bounds import ChainSolveError, RegimeError, solve_constrained_chain, tail_bound
from .matrices import (MAX_DP_ROWS, MAX_DP_SET, dumps, exact_union_distribution,
                       generate, load, monte_carlo_neighbors)
from .phase import ALGORITHM_EPS, phase_curve
from .recovery import (RecoveryProblem, er_recover, parse_vector, random_sparse_vector,
                       ssmp_recover, format_vector)

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE = 0, 1, 2
DEFAULT_DELTAS = tuple(round(0.05 * i, 2) for i in range(1, 20))


class UsageError(ValueError):
    pass


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating, Fraction)):
        return "%.17g" % float(v)
    return str(v)


def fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number or fraction: {text!r}")


def float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}")


def _header(argv) -> str:
    return f"# dyadic_expanders {__version__}: {shlex.join(['dyadic_expanders', *argv])}\n"


def _write_csv(out, argv, columns, rows):
    buf = io.StringIO()
    buf.write(_header(argv))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    _emit(out, buf.getvalue())


def _emit(out, text):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _check(cond, msg):
    if not cond:
        raise UsageError(msg)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_gen(args, argv):
    _check(1 <= args.d <= args.n, f"need 1 <= d <= n, got d={args.d}, n={args.n}")
    _check(args.N >= 1, f"N must be positive, got {args.N}")
    A = generate(args.n, args.N, args.d, signed=args.signed, seed=args.seed,
                 with_replacement=args.with_replacement)
    _emit(args.out, dumps(A))


def cmd_neighbor_stats(args, argv):
    _check(1 <= args.d <= args.n, f"need 1 <= d <= n, got d={args.d}, n={args.n}")
    _check(1 <= args.kstep <= args.kmax, "need 1 <= kstep <= kmax")
    _check(args.trials >= 1, "trials must be >= 1")
    ks = range(args.kstep, args.kmax + 1, args.kstep)
    st = monte_carlo_neighbors(args.n, args.d, ks, args.trials, args.seed, threads=args.threads)
    rows = zip(st.ks, st.mean, st.std, st.expected, st.rel_error)
    _write_csv(args.out, argv, ["k", "mean", "std", "expected", "rel_error"], rows)


def cmd_bound(args, argv):
    n, d, s = args.n, args.d, args.s
    _check(1 <= d <= n, f"need 1 <= d <= n, got d={d}, n={n}")
    _check(s >= 2, f"s must be >= 2, got {s}")
    top = min(d * s, n)
    if args.a_s:
        sweep = args.a_s
        for a in sweep:
            _check(d <= a <= top, f"a_s={a} outside [d, min(ds, n)] = [{d}, {top}]")
    else:
        sweep = list(range(d, top + 1))
    exact = None
    if n <= MAX_DP_ROWS and s <= MAX_DP_SET:
        exact = exact_union_distribution(n, d, s, exact=True)
    rows = []
    width = None
    for a in sweep:
        # the chain columns show the stationary chain pinned at a_s
        chain = solve_constrained_chain(n, d, s, a)
        b = tail_bound(n, d, s, a)
        tail = None
        if exact is not None:
            tail = float(sum(p for size, p in exact.items() if size <= a))
        rows.append([a, b, b > 1.0, tail, *chain.values])
        width = len(chain.values)
    labels = [f"a_{int(i)}" for i in chain.indices[:-1]] + [f"a_{s}"]
    _write_csv(args.out, argv,
               ["a_s", "bound", "vacuous", "exact_tail", *labels[:width]], rows)


def cmd_phase(args, argv):
    kind = args.kind
    grid = args.deltas or list(DEFAULT_DELTAS)
    _check(all(0 < x < 1 for x in grid), "deltas must lie in (0, 1)")
    _check(all(b > a for a, b in zip(grid, grid[1:])), "deltas must be strictly increasing")
    if kind in ALGORITHM_EPS:
        curve = phase_curve(grid, args.d, kind, args.n, kind="alg", rescale=args.rescale,
                            c=args.c, threads=args.threads)
    else:
        _check(args.eps is not None, f"--eps is required for --kind {kind}")
        _check(0 < args.eps < Fraction(1, 2), f"eps must lie in (0, 1/2), got {args.eps}")
        curve = phase_curve(grid, args.d, float(args.eps), args.n, kind=kind,
                            threads=args.threads)
    overlay = _read_overlay(args.overlay, curve.delta_grid) if args.overlay else None
    columns = ["delta", "rho", "status", "residual"] + (["overlay"] if overlay else [])
    rows = []
    for i, p in enumerate(curve.points()):
        row = [p.delta, p.rho if p.ok else None, p.status, p.residual]
        if overlay:
            row.append(overlay[i])
        rows.append(row)
    _write_csv(args.out, argv, columns, rows)


def _read_overlay(path, grid):
    """Second column of an external (delta, value) CSV, interpolated onto ``grid``."""
    xs, ys = [], []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            try:
                xs.append(float(parts[0]))
                ys.append(float(parts[1]))
            except (ValueError, IndexError):
                continue  # header row
    _check(len(xs) >= 1, f"overlay {path} holds no numeric rows")
    order = np.argsort(xs)
    xs, ys = np.asarray(xs)[order], np.asarray(ys)[order]
    return [float(np.interp(g, xs, ys)) if xs[0] <= g <= xs[-1] else None for g in grid]


def cmd_recover(args, argv):
    if args.matrix:
        A = load(args.matrix)
    else:
        _check(None not in (args.n, args.N, args.d),
               "give --matrix or all of --n, --N, --d")
        _check(1 <= args.d <= args.n, f"need 1 <= d <= n, got d={args.d}, n={args.n}")
        _check(args.seed is not None, "--seed is required to generate a matrix")
        A = generate(args.n, args.N, args.d, signed=args.signed, seed=args.seed)
    truth = None
    if args.y:
        with open(args.y) as fh:
            text = fh.read()
        lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        entries = ",".join(lines)
        idx = [int(e.split(":")[0]) for e in entries.split(",") if e.strip()]
        _check(all(0 <= i < A.n for i in idx),
               f"y has indices outside [0, {A.n}): y length must match n={A.n}")
        if args.y_length is not None:
            _check(args.y_length == A.n, f"y length {args.y_length} does not match n={A.n}")
        y = parse_vector(entries, A.n)
        _check(args.k is not None, "--k is required with --y")
        k = args.k
    else:
        _check(args.k is not None and 1 <= args.k <= A.N, "--k in [1, N] is required")
        _check(args.seed is not None, "--seed is required to synthesize x")
        truth = random_sparse_vector(A.N, args.k, args.seed + 1)
        y = A.matvec(truth)
        k = args.k
    problem = RecoveryProblem(matrix=A, y=y, k=k, eta=args.eta)
    if args.alg == "er":
        res = er_recover(problem, args.eps if args.eps is not None else Fraction(1, 4))
    else:
        res = ssmp_recover(problem, c=args.c, T=args.T)
    exact = None if truth is None else bool(np.array_equal(res.estimate, truth))
    _write_csv(args.out, argv,
               ["algorithm", "k", "iterations", "converged", "residual_l1", "exact", "estimate"],
               [[args.alg, k, res.iterations, res.converged, res.residual_l1, exact,
                 format_vector(res.estimate)]])


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="dyadic_expanders",
        description="Sparse expander matrices: generation, neighbour statistics, "
                    "tail bounds, phase transitions and sparse recovery.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def out(p):
        p.add_argument("--out", default="-", help="output path (default stdout)")

    p = sub.add_parser("gen", help="draw an SE/SSE matrix")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--signed", action="store_true", help="SSE (+-1 entries)")
    p.add_argument("--with-replacement", action="store_true",
                   help="draw rows with replacement (columns may hold < d entries)")
    p.add_argument("--seed", type=int, required=True)
    out(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("neighbor-stats", help="Monte-Carlo |A_k| against the closed form")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--kstep", type=int, default=1)
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--threads", type=int, default=1)
    out(p)
    p.set_defaults(func=cmd_neighbor_stats)

    p = sub.add_parser("bound", help="tail bound on |A_s| over an a_s sweep")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--a-s", type=float_list, default=None, dest="a_s",
                   help="comma-separated a_s values (default: every integer in [d, min(ds, n)])")
    out(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("phase", help="phase-transition curve rho(delta)")
    p.add_argument("--kind", choices=["exp", "bi", "l1", "ssmp", "er"], required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=fraction, default=None, help="epsilon, e.g. 1/6 or 0.25")
    p.add_argument("--deltas", type=float_list, default=None)
    p.add_argument("--rescale", action="store_true",
                   help="divide algorithm curves by their sparsity inflation")
    p.add_argument("--c", type=int, default=2, help="SSMP expansion factor")
    p.add_argument("--overlay", default=None, help="external delta,value CSV to carry along")
    p.add_argument("--threads", type=int, default=1)
    out(p)
    p.set_defaults(func=cmd_phase)

    p = sub.add_parser("recover", help="run ER or SSMP on one instance")
    p.add_argument("--alg", choices=["er", "ssmp"], required=True)
    p.add_argument("--matrix", default=None, help="matrix file written by gen")
    p.add_argument("--n", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--signed", action="store_true")
    p.add_argument("--y", default=None, help="measurements as index:value list")
    p.add_argument("--y-length", type=int, default=None, dest="y_length",
                   help="declared length of y, checked against n")
    p.add_argument("--k", type=int)
    p.add_argument("--eps", type=fraction, default=None, help="ER epsilon (default 1/4)")
    p.add_argument("--c", type=int, default=2)
    p.add_argument("--T", type=int, default=None)
    p.add_argument("--eta", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=None)
    out(p)
    p.set_defaults(func=cmd_recover)
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args, argv)
    except (UsageError, ValueError, RegimeError, ChainSolveError, IndexError,
            FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
