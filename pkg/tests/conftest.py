from __future__ import annotations

import pytest

_ACCEPTANCE_LINES: list[str] = []


def pytest_runtest_logreport(report):
    """Collect one pass/fail line per acceptance criterion."""
    if "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call":
        status = "PASS" if report.passed else "FAIL"
        _ACCEPTANCE_LINES.append(f"{status}  {name}")
    elif report.when == "setup" and report.skipped:
        _ACCEPTANCE_LINES.append(f"SKIP  {name}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20240817)
