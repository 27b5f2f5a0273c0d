import numpy as np
import pytest

from cocycle_lab.symbolic import Point

_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """``acceptance(n, ok, detail)`` prints and records one verdict line per criterion."""

    def record(n, ok, detail=""):
        line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        _ACCEPTANCE_LINES.append((n, line))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_ACCEPTANCE_LINES):
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def random_point(rng, n_symbols=2, max_tail=3, max_core=6, max_origin=4):
    """Random eventually periodic point of the full shift."""
    left = tuple(int(v) for v in rng.integers(0, n_symbols, rng.integers(1, max_tail + 1)))
    core = tuple(int(v) for v in rng.integers(0, n_symbols, rng.integers(0, max_core + 1)))
    right = tuple(int(v) for v in rng.integers(0, n_symbols, rng.integers(1, max_tail + 1)))
    return Point(left, core, right, int(rng.integers(0, max_origin + 1)))
