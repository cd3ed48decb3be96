import json
import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

DATA = Path(__file__).resolve().parents[1] / "src" / "flowknot" / "data"
SEED = os.environ.get("FLOWKNOT_SEED")

settings.register_profile(
    "flowknot",
    deadline=None,
    max_examples=40,
    derandomize=SEED is None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("flowknot")

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion")
    if SEED is not None:
        config.option.hypothesis_seed = int(SEED)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    num, text = marker.args
    if report.when == "call" or (report.when == "setup" and report.failed):
        prev = _criteria.get(num, (text, True))[1]
        _criteria[num] = (text, prev and report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        text, ok = _criteria[num]
        terminalreporter.write_line(f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {text}")


@pytest.fixture(scope="session")
def frozen():
    return json.loads((Path(__file__).with_name("oracle_values.json")).read_text())


@pytest.fixture(scope="session")
def data_dir():
    return DATA
