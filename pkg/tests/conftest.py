import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    key = marker.args[0]
    if report.when == "call" or (report.when == "setup" and report.failed):
        previous = _criteria.get(key, (True, marker.kwargs.get("title", "")))
        _criteria[key] = (previous[0] and report.passed, previous[1])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria, key=lambda s: int(s.split("-")[1])):
        ok, title = _criteria[key]
        terminalreporter.write_line(f"{key:6} {'PASS' if ok else 'FAIL'}  {title}")
