import pytest

_LINES = []


@pytest.fixture
def criterion():
    """Record and print one PASS/FAIL line for an acceptance criterion."""

    def report(number, ok, detail=""):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
        _LINES.append(line)
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
