import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(name): acceptance criterion checked by this test"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    terminal = item.config.pluginmanager.get_plugin("terminalreporter")
    if terminal is None:
        return
    verdict = "PASS" if report.passed else "FAIL"
    terminal.write_line(f"[{verdict}] acceptance: {marker.args[0]}")
