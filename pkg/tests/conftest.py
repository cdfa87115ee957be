import pytest

# criterion number -> (passed, summary); filled by tests/test_acceptance.py
ACCEPTANCE_RESULTS: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        passed, summary = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} criterion {n}: {summary}")
