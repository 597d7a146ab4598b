import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from galimage.nfresidue import ResiduePrime  # noqa: E402
from galimage.store import DataSource, fetch_newform  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def source():
    return DataSource(offline=True)


@pytest.fixture(scope="session")
def ex1(source):
    return fetch_newform("9099.2.a.g", source)


@pytest.fixture(scope="session")
def ex2(source):
    return fetch_newform("71.3.b.a", source)


@pytest.fixture(scope="session")
def lam1(ex1):
    return ResiduePrime(7, 3, ex1.field)


@pytest.fixture(scope="session")
def lam1_conj(ex1):
    return ResiduePrime(7, 4, ex1.field)


@pytest.fixture(scope="session")
def lam2(ex2):
    return ResiduePrime(41, 11, ex2.field)


@pytest.fixture(scope="session")
def acceptance_line():
    return ACCEPTANCE_LINES.append


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
