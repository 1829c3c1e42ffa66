from __future__ import annotations

import pytest

from ctxwin import SyntheticConfig, generate_synthetic

_ACCEPTANCE_RESULTS: list[tuple[str, str]] = []


@pytest.fixture(scope="session")
def small_corpus():
    return generate_synthetic(SyntheticConfig(documents=12, seed=101))


@pytest.fixture(scope="session")
def signal_corpus():
    # enough learnable signal for training smoke tests to move off chance
    return generate_synthetic(
        SyntheticConfig(documents=60, seed=7, label_signal=0.9, annotation_density=0.8)
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call" and not (report.when == "setup" and report.skipped):
        return
    if "test_acceptance" not in item.nodeid:
        return
    name = item.name
    if report.skipped:
        status = "SKIP"
    elif report.passed:
        status = "PASS"
    else:
        status = "FAIL"
    _ACCEPTANCE_RESULTS.append((name, status))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in _ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{status:<5} {name}")
