import pytest

from c2convex import PiecewiseFn

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def flat_fn():
    """x^2 on [-1, 0], 0 on [0, 1], (x - 1)^2 on [1, 2]."""
    return PiecewiseFn.from_global([-1.0, 0.0, 1.0, 2.0], [[0, 0, 1], [0], [1, -2, 1]])


@pytest.fixture
def abs_fn():
    return PiecewiseFn.from_global([-1.0, 0.0, 1.0], [[0, -1], [0, 1]])
