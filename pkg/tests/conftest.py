import pytest

_LINES = {}


@pytest.fixture
def criterion():
    """``criterion(number, ok, text)`` records a verdict line and returns ``ok``."""

    def record(number, ok, text):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {text}"
        _LINES[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_LINES):
            terminalreporter.write_line(_LINES[n])
