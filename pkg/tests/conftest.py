import numpy as np
import pytest

from bootperc.lattice import NeighborhoodSpec

ACCEPTANCE_LINES = []


def random_spec(rng, d, amax=3):
    a = tuple(sorted(int(x) for x in rng.integers(1, amax + 1, size=d)))
    r = int(rng.integers(1, 2 * sum(a) + 1))
    return NeighborhoodSpec(a, r)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def report():
    """Record one PASS/FAIL line for the acceptance summary."""

    def _report(name, ok, detail=""):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}".rstrip())
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
