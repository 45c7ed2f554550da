"""Shared fixtures plus a summary hook for the acceptance criteria.

Each test_criterion_* test in test_acceptance.py gets one PASS/FAIL line in
the terminal summary so the criteria can be audited at a glance.
"""

import numpy as np
import pytest

_ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def pytest_runtest_makereport(item, call):
    if call.when != "call":
        return
    if not item.name.startswith("test_criterion_"):
        return
    doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
    _ACCEPTANCE_RESULTS[item.name] = (call.excinfo is None, doc)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE_RESULTS):
        ok, doc = _ACCEPTANCE_RESULTS[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {name}: {doc}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
