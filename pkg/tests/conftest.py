import pytest

# Lines reported by the acceptance criteria; echoed in the terminal summary so
# they appear even when output capture is on.
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    def emit(line: str) -> None:
        print(line)
        ACCEPTANCE_LINES.append(line)
    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
