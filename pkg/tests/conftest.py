import pytest

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_record():
    """Record one PASS/FAIL line per acceptance criterion for the terminal summary."""
    def record(number: int, title: str, passed: bool, detail: str) -> None:
        status = "PASS" if passed else "FAIL"
        _ACCEPTANCE_LINES.append(f"[{status}] criterion {number:>2}: {title} -- {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
