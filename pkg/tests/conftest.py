"""Shared pytest wiring: surface acceptance verdict lines.

The acceptance tests record one PASS/FAIL line per shipped guarantee;
fd-level capture would otherwise swallow them, so they are replayed in
the terminal summary where they always appear.
"""

ACCEPTANCE_VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_VERDICTS:
        return
    terminalreporter.section("acceptance verdicts")
    for line in ACCEPTANCE_VERDICTS:
        terminalreporter.write_line(line)
