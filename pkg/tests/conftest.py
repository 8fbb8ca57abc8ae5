import pytest

from gammalab.characters import Session


@pytest.fixture(scope="session")
def S2():
    return Session(2)


@pytest.fixture(scope="session")
def S3():
    return Session(3)


# one line per acceptance criterion, echoed at the end of the run
ACCEPTANCE: list[str] = []


@pytest.fixture
def record():
    def _record(label: str, ok: bool, note: str = "") -> bool:
        line = f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  ({note})" if note else "")
        ACCEPTANCE.append(line)
        print(line)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
