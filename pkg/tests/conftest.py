import pytest

from nfdelta import builtin_fields


@pytest.fixture(scope="session")
def fields():
    return builtin_fields()


@pytest.fixture(scope="session")
def Q(fields):
    return fields["Q"]


@pytest.fixture(scope="session")
def Qi(fields):
    return fields["Qi"]


@pytest.fixture(scope="session")
def Q2(fields):
    return fields["Qsqrt2"]


@pytest.fixture(scope="session")
def Q5(fields):
    return fields["Qsqrt-5"]


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"criterion {k:2d} {ACCEPTANCE_LINES[k]}")
