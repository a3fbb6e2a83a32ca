import pytest

RESULTS: dict[str, str] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(name): top-level acceptance criterion"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker and rep.when == "call":
        name = marker.args[0]
        RESULTS[name] = "PASS" if rep.passed else "FAIL"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, status in RESULTS.items():
        terminalreporter.write_line(f"[{status}] {name}")
