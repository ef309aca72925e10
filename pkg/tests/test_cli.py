import csv
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from dyadic_expanders.matrices import dumps, generate, load


def run(*args):
    cmd = [sys.executable, "-m", "dyadic_expanders", *map(str, args)]
    return subprocess.run(cmd, capture_output=True, text=True)


def rows(text):
    lines = text.splitlines()
    assert lines[0].startswith("# dyadic_expanders ")
    return list(csv.DictReader(lines[1:]))


def test_help():
    cp = run("--help")
    assert cp.returncode == 0
    for sub in ("gen", "neighbor-stats", "bound", "phase", "recover"):
        assert sub in cp.stdout


def test_gen_round_trip_and_determinism(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for out in (a, b):
        cp = run("gen", "--n", 1024, "--N", 4096, "--d", 8, "--seed", 7, "--out", out)
        assert cp.returncode == 0, cp.stderr
    assert a.read_bytes() == b.read_bytes()
    A = load(a)
    assert A == generate(1024, 4096, 8, seed=7)
    assert dumps(A) == a.read_text()


def test_gen_validation():
    cp = run("gen", "--d", 9, "--n", 8, "--N", 3, "--seed", 1)
    assert cp.returncode == 2
    assert "d=9" in cp.stderr
    assert run("gen", "--n", 8, "--N", 3, "--d", 2).returncode == 2  # seed is mandatory


def test_neighbor_stats_single_row():
    cp = run("neighbor-stats", "--n", 64, "--d", 4, "--kmax", 1, "--trials", 5, "--seed", 1)
    assert cp.returncode == 0, cp.stderr
    out = rows(cp.stdout)
    assert len(out) == 1
    assert out[0]["k"] == "1" and float(out[0]["std"]) == 0 and float(out[0]["mean"]) == 4


def test_neighbor_stats_threads_do_not_change_output():
    args = ["neighbor-stats", "--n", 128, "--d", 4, "--kmax", 30, "--kstep", 5,
            "--trials", 50, "--seed", 3]
    one = run(*args).stdout.splitlines()[1:]
    many = run(*args, "--threads", 4).stdout.splitlines()[1:]
    assert one == many
    ks = [int(r.split(",")[0]) for r in one[1:]]
    assert ks == sorted(ks)


def test_bound_sweep():
    cp = run("bound", "--n", 1024, "--d", 8, "--s", 16)
    assert cp.returncode == 0, cp.stderr
    out = rows(cp.stdout)
    assert [float(r["a_s"]) for r in out] == list(range(8, 129))
    below = [float(r["bound"]) for r in out if float(r["a_s"]) < 120]
    assert all(a <= b * (1 + 1e-9) for a, b in zip(below, below[1:]))
    last = out[-1]
    assert [float(last[f"a_{i}"]) for i in (1, 2, 4, 8, 16)] == [8, 16, 32, 64, 128]
    assert last["vacuous"] == "1"


def test_bound_exact_tail_column():
    cp = run("bound", "--n", 20, "--d", 3, "--s", 5)
    out = rows(cp.stdout)
    for r in out:
        assert float(r["bound"]) >= float(r["exact_tail"])


def test_bound_validation():
    assert run("bound", "--n", 1024, "--d", 8, "--s", 16, "--a-s", 200).returncode == 2


def test_phase_exp_and_bi(tmp_path):
    cp = run("phase", "--kind", "exp", "--d", 8, "--eps", "0.25", "--n", 1024)
    assert cp.returncode == 0, cp.stderr
    out = rows(cp.stdout)
    assert len(out) == 19
    assert all(r["rho"] == "" for r in out)  # no root at this n
    cp = run("phase", "--kind", "bi", "--d", 8, "--eps", "1/4", "--n", 2**20)
    out = rows(cp.stdout)
    assert all(r["status"] == "ok" and abs(float(r["residual"])) < 1e-10 for r in out)


def test_phase_algorithm_ordering():
    n = 2**40
    curves = {}
    for kind in ("er", "l1", "ssmp"):
        cp = run("phase", "--kind", kind, "--d", 8, "--n", n, "--deltas", "0.1,0.5,0.9")
        assert cp.returncode == 0, cp.stderr
        curves[kind] = [float(r["rho"] or 0) for r in rows(cp.stdout)]
    for er, l1, ssmp in zip(curves["er"], curves["l1"], curves["ssmp"]):
        assert er >= l1 >= ssmp


def test_phase_overlay(tmp_path):
    ov = tmp_path / "ric.csv"
    ov.write_text("delta,rho\n0.1,0.01\n0.9,0.09\n")
    cp = run("phase", "--kind", "bi", "--d", 8, "--eps", "1/4", "--n", 2**20,
             "--deltas", "0.05,0.5", "--overlay", ov)
    out = rows(cp.stdout)
    assert out[0]["overlay"] == "" and float(out[1]["overlay"]) == pytest.approx(0.05)


def test_phase_validation():
    assert run("phase", "--kind", "exp", "--d", 8, "--n", 1024).returncode == 2
    assert run("phase", "--kind", "exp", "--d", 8, "--n", 1024, "--eps", "1/2").returncode == 2
    assert run("phase", "--kind", "exp", "--d", 8, "--n", 1024, "--eps", "x").returncode == 2


def test_recover_synthesized_one_sparse_er():
    cp = run("recover", "--alg", "er", "--n", 64, "--N", 16, "--d", 5, "--k", 1, "--seed", 2)
    assert cp.returncode == 0, cp.stderr
    r = rows(cp.stdout)[0]
    assert r["exact"] == "1" and r["iterations"] == "1" and r["converged"] == "1"


def test_recover_from_files(tmp_path):
    seed = int(next(s for s in (Path(__file__).parent / "data" / "certified_seeds.txt")
                    .read_text().splitlines() if not s.startswith("#")))
    A = generate(24, 12, 4, signed=True, seed=seed)
    mfile = tmp_path / "A.txt"
    mfile.write_text(dumps(A))
    x = np.zeros(12)
    x[[2, 9]] = (2, -1)
    y = A.matvec(x)
    yfile = tmp_path / "y.txt"
    yfile.write_text(",".join(f"{i}:{v:.17g}" for i, v in enumerate(y) if v))
    cp = run("recover", "--alg", "ssmp", "--matrix", mfile, "--y", yfile, "--k", 2)
    assert cp.returncode == 0, cp.stderr
    r = rows(cp.stdout)[0]
    assert r["converged"] == "1" and float(r["residual_l1"]) == 0
    assert r["estimate"] == "2:2,9:-1"


def test_recover_rejects_bad_y(tmp_path):
    A = generate(24, 12, 4, seed=0)
    mfile = tmp_path / "A.txt"
    mfile.write_text(dumps(A))
    yfile = tmp_path / "y.txt"
    yfile.write_text("30:1")
    cp = run("recover", "--alg", "er", "--matrix", mfile, "--y", yfile, "--k", 1)
    assert cp.returncode == 2
    yfile.write_text("3:1")
    cp = run("recover", "--alg", "er", "--matrix", mfile, "--y", yfile, "--k", 1,
             "--y-length", 20)
    assert cp.returncode == 2


def test_recover_unconverged_exits_zero():
    cp = run("recover", "--alg", "er", "--n", 24, "--N", 12, "--d", 4, "--k", 1, "--seed", 3)
    assert cp.returncode == 0
    assert rows(cp.stdout)[0]["converged"] == "0"
