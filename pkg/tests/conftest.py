import os
from pathlib import Path

import pytest

from skisat.cnf import Cnf, read_dimacs

DATA = Path(__file__).parent / "data"

# Six-variable, three-clause example used throughout the docs.
EXAMPLE_CLAUSES = [[1, -2, 5], [-3, -4, 5], [-6, 4, 2]]

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def example_cnf() -> Cnf:
    return Cnf.from_lists(6, EXAMPLE_CLAUSES)


@pytest.fixture(scope="session")
def uf20_01() -> Cnf:
    return read_dimacs(DATA / "uf20-01.cnf")


@pytest.fixture(scope="session")
def uf50_proxies() -> list[Cnf]:
    return [read_dimacs(p) for p in sorted(DATA.glob("rand50-218-s*.cnf"))]


def satlib_file(relpath: str) -> Path | None:
    """Look up a SATLIB benchmark file under $SKISAT_SATLIB_DIR or tests/data/satlib."""
    roots = [os.environ.get("SKISAT_SATLIB_DIR"), DATA / "satlib"]
    for root in roots:
        if root and (Path(root) / relpath).is_file():
            return Path(root) / relpath
    return None


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line per acceptance criterion for the terminal summary."""
    lines = []

    def record(label: str, passed: bool, detail: str = ""):
        lines.append(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}".rstrip())
        return passed

    yield record
    ACCEPTANCE_LINES.extend(lines)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
