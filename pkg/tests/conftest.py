"""Shared pytest wiring.

Collects the outcome of each ``test_criterion_*`` test and prints one
ACCEPTANCE line per criterion in the terminal summary.
"""

from __future__ import annotations

import re

_CRITERION = re.compile(r"test_criterion_(\d+)")
_results: dict[int, str] = {}


def pytest_runtest_logreport(report):
    match = _CRITERION.search(report.nodeid)
    if match is None:
        return
    num = int(match.group(1))
    if report.when == "call":
        _results[num] = "PASS" if report.passed else "FAIL"
    elif report.when == "setup":
        if report.skipped:
            _results[num] = "SKIP"
        elif report.failed:
            _results[num] = "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_results):
        terminalreporter.write_line(f"ACCEPTANCE {num}: {_results[num]}")
