import pytest

_RESULTS: dict[int, tuple[str, str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when not in ("setup", "call"):
        return
    if report.when == "setup" and report.passed:
        return
    number, title = marker.args
    detail = dict(item.user_properties).get("detail", "")
    if report.failed:
        msg = str(report.longrepr).strip().splitlines()[-1] if report.longrepr else ""
        detail = f"{detail} {msg}".strip()
    _RESULTS[number] = ("PASS" if report.passed else "FAIL", title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        status, title, detail = _RESULTS[number]
        terminalreporter.write_line(f"[{status}] criterion {number:2d}: {title}" + (f" ({detail})" if detail else ""))
