"""Collects acceptance results and prints one line per criterion."""

import pytest

_RESULTS: dict[str, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(cid, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    cid, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        detail = ""
        if report.failed:
            detail = str(report.longrepr.reprcrash.message) if hasattr(report.longrepr, "reprcrash") else ""
        _RESULTS[cid] = ("PASS" if report.passed else "FAIL", title, detail.splitlines()[0] if detail else "")


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_RESULTS):
        status, title, detail = _RESULTS[cid]
        line = f"{cid} {status}  {title}"
        if detail:
            line += f"  ({detail[:160]})"
        terminalreporter.write_line(line)
