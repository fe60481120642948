"""Shared fixtures and the per-criterion pass/fail summary for acceptance tests."""

from __future__ import annotations

from collections import OrderedDict

import pytest

_RESULTS: "OrderedDict[int, dict]" = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    num, text = mark.args
    entry = _RESULTS.setdefault(num, {"text": text, "ok": True, "tests": 0, "seconds": 0.0})
    if rep.when == "call":
        entry["tests"] += 1
        entry["seconds"] += rep.duration
    if rep.failed or (rep.when == "call" and rep.skipped):
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_RESULTS):
        e = _RESULTS[num]
        status = "PASS" if e["ok"] and e["tests"] else "FAIL"
        tr.write_line(f"CRITERION {num:>2} [{status}] {e['text']} ({e['seconds']:.1f} s)")
