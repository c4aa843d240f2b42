import numpy as np
import pytest

from drlos.core import Population, Solution


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_solution(f, cv=0.0, x=None):
    f = np.asarray(f, dtype=float)
    x = np.zeros(2) if x is None else x
    return Solution(x=x, f=f, cv_per=[cv], cv=cv)


def make_population(fs, cvs=None):
    cvs = [0.0] * len(fs) if cvs is None else cvs
    return Population([make_solution(f, cv) for f, cv in zip(fs, cvs)])


# one (label, passed, detail) entry per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in sorted(ACCEPTANCE_LINES, key=lambda t: int(t[0].split()[1])):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}: {detail}")
