import pytest

_RESULTS = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    details = "; ".join(f"{k}={v}" for k, v in item.user_properties)
    _RESULTS.append((number, title, report.outcome.upper(), details))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, outcome, details in sorted(_RESULTS):
        verdict = "PASS" if outcome == "PASSED" else "FAIL"
        line = f"[{verdict}] {number:>2}. {title}"
        if details:
            line += f"  ({details})"
        terminalreporter.write_line(line)
