import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one acceptance line; printed again in the terminal summary."""
    def _report(label, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {label}: {detail}"
        print(line)
        ACCEPTANCE_LINES.append(line)
        return ok
    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
