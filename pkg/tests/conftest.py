"""Collects one verdict line per acceptance criterion and prints them at the end."""

from __future__ import annotations

import pytest

_VERDICTS: dict[int, tuple[str, bool, str]] = {}


def pytest_runtest_makereport(item, call):
    if call.when != "call":
        return
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    props = dict(item.user_properties)
    passed = call.excinfo is None
    detail = props.get("detail", "")
    if not passed and not detail:
        detail = call.excinfo.exconly().splitlines()[0][:200]
    _VERDICTS[number] = (title, passed, detail)


@pytest.hookimpl(trylast=True)
def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_VERDICTS):
        title, passed, detail = _VERDICTS[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} {status}  {title}: {detail}")
