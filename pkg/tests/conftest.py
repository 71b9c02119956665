import random
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from qfrep.forms import QuadraticForm  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_pd(rng: random.Random, n: int, max_entry: int = 6, max_off: int = 2) -> QuadraticForm:
    """Strictly diagonally dominant symmetric integer matrix (eigenvalues >= 1)."""
    M = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            M[i][j] = M[j][i] = rng.randint(-max_off, max_off)
    for i in range(n):
        s = sum(abs(M[i][j]) for j in range(n) if j != i)
        lo = s + 1
        M[i][i] = rng.randint(lo, max(lo, max_entry))
    return QuadraticForm(M)


def random_target(rng: random.Random, m: int, max_entry: int = 12) -> QuadraticForm:
    while True:
        d = [rng.randint(1, max_entry) for _ in range(m)]
        M = [[0] * m for _ in range(m)]
        for i in range(m):
            M[i][i] = d[i]
            for j in range(i + 1, m):
                M[i][j] = M[j][i] = rng.randint(-max_entry, max_entry)
        try:
            return QuadraticForm(M)
        except ValueError:
            continue


def random_unimodular(rng: random.Random, n: int, steps: int = 6):
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if n > 1:
            c = rng.choice([-1, 1])
            for row in U:
                row[j] += c * row[i]
        if rng.random() < 0.3:
            k = rng.randrange(n)
            for row in U:
                row[k] = -row[k]
    return U


@st.composite
def pd_forms(draw, n_min=1, n_max=3, max_entry=6):
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(n_min, n_max))
    return random_pd(random.Random(seed), n, max_entry)


@st.composite
def targets(draw, m_min=1, m_max=2, max_entry=12):
    seed = draw(st.integers(0, 2**32 - 1))
    m = draw(st.integers(m_min, m_max))
    return random_target(random.Random(seed), m, max_entry)


@pytest.fixture
def rng():
    return random.Random(20261016)


ACCEPTANCE_LINES: list[str] = []


def record_criterion(k: int, ok: bool, detail: str) -> None:
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
