import pytest

from mulmin.tensor import load_fixture

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def pennies():
    return load_fixture("matching_pennies")


@pytest.fixture
def dilemma():
    return load_fixture("prisoners_dilemma")


@pytest.fixture
def sexes():
    return load_fixture("battle_of_sexes")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
