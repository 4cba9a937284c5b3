import pytest

from aqs import kernels

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session", autouse=True)
def jit_warmup():
    # Pay the one-time compile cost before any timed assertion runs.
    kernels.warmup()


@pytest.fixture(scope="session")
def criterion_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
