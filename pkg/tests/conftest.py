import re

import pytest

_CRITERION = re.compile(r"test_criterion_(\d+)[a-z]?_")
_outcomes = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = _CRITERION.match(item.name)
    if m is None:
        return
    n = int(m.group(1))
    failed = rep.failed or (rep.when == "call" and rep.skipped)
    prev = _outcomes.get(n, True)
    if rep.when == "call" or failed:
        _outcomes[n] = prev and not failed


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_outcomes):
        terminalreporter.write_line(f"CRITERION {n:2d} {'PASS' if _outcomes[n] else 'FAIL'}")
