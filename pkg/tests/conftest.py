"""Prints one PASS/FAIL line per acceptance criterion after the run."""

import re

_results: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", report.nodeid)
    if not m:
        return
    num = int(m.group(1))
    if report.when == "call" or (report.when == "setup" and not report.passed):
        detail = dict(report.user_properties).get("detail", "")
        _results[num] = ("PASS" if report.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_results):
        verdict, detail = _results[num]
        terminalreporter.write_line(f"{verdict} criterion {num}: {detail}")
