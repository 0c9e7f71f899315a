import pytest

_CRITERIA = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion; the outcome is printed after the run."""
    def register(number, title):
        _CRITERIA[request.node.nodeid] = (number, title)
    return register


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and item.nodeid in _CRITERIA:
        number, title = _CRITERIA[item.nodeid]
        status = "PASS" if report.passed else "FAIL"
        line = f"criterion {number:>2}: {status}  {title}"
        print("\n" + line)
        item.config._criteria_lines = getattr(item.config, "_criteria_lines", []) + [(number, line)]


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "_criteria_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
