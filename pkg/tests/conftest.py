import re

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

_CRITERION = re.compile(r"test_acceptance\.py::test_(criterion_\d+)_(\w+)")
_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def sweep_state_10k():
    """One shared engine scan of n = 1..10000."""
    from tritstats import sweep

    return sweep.run_sweep(10_000)


def pytest_runtest_logreport(report):
    match = _CRITERION.search(report.nodeid)
    if not match:
        return
    label = f"{match.group(1).replace('_', ' ')} ({match.group(2).replace('_', ' ')})"
    if report.when == "call" and not report.skipped:
        status = "PASS" if report.passed else "FAIL"
        _ACCEPTANCE_LINES.append(f"{label}: {status}")
    elif report.skipped:
        reason = ""
        if isinstance(report.longrepr, tuple):
            reason = f" [{report.longrepr[2]}]"
        _ACCEPTANCE_LINES.append(f"{label}: SKIPPED{reason}")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
