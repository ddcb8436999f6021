"""Shared fixtures and the per-criterion acceptance report."""

import functools

import pytest

from clustercnf.sweep import SweepConfig, run_sweep

ACCEPTANCE_SEED = 2024

_outcomes: dict = {}


@functools.lru_cache(maxsize=None)
def cached_sweep(method, n, lo=1.0, hi=4.0, step=0.1, instances=50):
    """Internal-counter sweep shared by every acceptance test that needs it."""
    cfg = SweepConfig(method, n, 3, lo, hi, step, instances, budget=60.0,
                      base_seed=ACCEPTANCE_SEED)
    return tuple(run_sweep(cfg))


@pytest.fixture(scope="session")
def sweep():
    return cached_sweep


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        num, title = mark.args
        entry = _outcomes.setdefault(num, [title, True, []])
        if not report.passed:
            entry[1] = False
            entry[2].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_outcomes):
        title, ok, failed = _outcomes[num]
        line = f"{'PASS' if ok else 'FAIL'}  criterion {num:>2}: {title}"
        if failed:
            line += f"  [failed: {', '.join(failed)}]"
        terminalreporter.write_line(line)
