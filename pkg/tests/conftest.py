from fractions import Fraction
from pathlib import Path

import pytest

from dyadic_expanders.matrices import generate, is_expander_on

DATA = Path(__file__).parent / "data"

# certification level of the small recovery corpus
CORPUS = dict(n=24, N=12, d=4, k=2, eps=Fraction(1, 5))

ACCEPTANCE_LINES = []


def corpus_seeds():
    lines = (DATA / "certified_seeds.txt").read_text().splitlines()
    return [int(s) for s in lines if s.strip() and not s.startswith("#")]


def build_corpus(signed):
    """Re-certify every cached seed; the seed file is only a search cache."""
    out = []
    for seed in corpus_seeds():
        A = generate(CORPUS["n"], CORPUS["N"], CORPUS["d"], signed=signed, seed=seed)
        assert is_expander_on(A, CORPUS["k"], CORPUS["eps"]), f"seed {seed} not certified"
        out.append(A)
    return out


@pytest.fixture(scope="session")
def se_corpus():
    return build_corpus(signed=False)


@pytest.fixture(scope="session")
def sse_corpus():
    return build_corpus(signed=True)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
