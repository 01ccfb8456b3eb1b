"""Collects one verdict per acceptance criterion and prints them after the run."""
import pytest

_VERDICTS = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    name = marker.args[0]
    if hasattr(item, "callspec"):
        name += f"[{item.callspec.id}]"
    detail = dict(item.user_properties).get("detail", "")
    if report.when == "call":
        if hasattr(report, "wasxfail"):
            verdict = "FAIL (expected)" if report.skipped else "XPASS"
            detail = detail or report.wasxfail
        elif report.skipped:
            verdict = "SKIP"
            detail = report.longrepr[2].removeprefix("Skipped: ") if isinstance(report.longrepr, tuple) else detail
        else:
            verdict = report.outcome.upper()
            verdict = {"PASSED": "PASS", "FAILED": "FAIL"}.get(verdict, verdict)
        _VERDICTS.append((verdict, name, detail))
    elif report.when == "setup" and report.skipped:
        reason = report.longrepr[2] if isinstance(report.longrepr, tuple) else str(report.longrepr)
        _VERDICTS.append(("SKIP", name, reason.removeprefix("Skipped: ")))


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for verdict, name, detail in _VERDICTS:
        terminalreporter.write_line(f"{verdict:<16} {name}" + (f"  -- {detail}" if detail else ""))
