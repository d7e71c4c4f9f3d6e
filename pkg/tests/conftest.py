"""Shared pytest plumbing: a visible pass/fail line per acceptance criterion.

Criterion results are collected while the acceptance tests run and re-printed
in the terminal summary so they show up without -s.
"""

CRITERION_LINES = []


def record_criterion(name: str, passed: bool, detail: str) -> None:
    CRITERION_LINES.append((name, passed, detail))
    print(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not CRITERION_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in CRITERION_LINES:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
