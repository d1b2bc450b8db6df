import pytest

from neumann.phase import make_potential, make_state

ACCEPTANCE_LINES = []


@pytest.fixture
def e1():
    """A = diag(1,1,2), q = e1, p = e2."""
    return make_potential([1, 2], [2, 1]), make_state([1, 0, 0], [0, 1, 0])


@pytest.fixture
def e2():
    return make_potential([1, 2], [2, 1]), make_state([0, 0, 1], [0, 0, 0])


@pytest.fixture
def e3():
    """A = diag(1,1,1,4), q = (1,1,1,1)/2, p = (1,-1,1,-1)/2."""
    return (
        make_potential([1, 4], [3, 1]),
        make_state(["1/2"] * 4, ["1/2", "-1/2", "1/2", "-1/2"]),
    )


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
