import pytest

_ACCEPTANCE_LINES = []


@pytest.fixture
def report_criterion():
    """Record one PASS/FAIL line for the acceptance summary."""

    def record(number, ok, text):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number}: {text}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
