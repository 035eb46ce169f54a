import pytest

acceptance_lines: list = []


@pytest.fixture(scope="session")
def criterion_report():
    """Shared registry; each acceptance test appends one PASS/FAIL line."""
    return acceptance_lines


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
