import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).resolve().parent.parent / "src" / "efa" / "data"


def fixture_path(name: str) -> Path:
    return DATA / f"{name}.json"


def load(name: str):
    from efa.io import parse_input

    return parse_input(fixture_path(name))


@pytest.fixture
def QQ():
    from efa.arith import QQ

    return QQ


@pytest.fixture(scope="session")
def Qi():
    from efa.arith import NumberField

    return NumberField([1, 0, 1], 1j)


@pytest.fixture(scope="session")
def Qsqrt2():
    from efa.arith import NumberField

    return NumberField([-2, 0, 1], 1.4142)


CRITERIA: dict[int, str] = {}


@pytest.fixture
def criterion_line():
    """Record the one-line verdict of an acceptance criterion."""

    def record(number: int, ok: bool, text: str):
        CRITERIA[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {text}"
        print(CRITERIA[number])

    return record


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for k in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[k])
