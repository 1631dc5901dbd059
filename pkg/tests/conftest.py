import pytest

from sadslab import make_hyperbolic, make_sads


@pytest.fixture(scope="session")
def sads1():
    return make_sads(1.0)


@pytest.fixture(scope="session")
def sads2():
    return make_sads(2.0)


@pytest.fixture(scope="session")
def hyperbolic():
    return make_hyperbolic()


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import ACCEPTANCE_LINES

    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("]")[1].split(".")[0])):
            terminalreporter.write_line(line)
