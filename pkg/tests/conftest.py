import numpy as np
import pytest

from gaussent.data import MEASURED_TILTED, MEASURED_UNTILTED


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def untilted():
    return MEASURED_UNTILTED.copy()


@pytest.fixture
def tilted():
    return MEASURED_TILTED.copy()


_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    name = report.nodeid.split("::")[-1]
    if "test_acceptance.py" in report.nodeid and name.startswith("test_criterion_"):
        _ACCEPTANCE[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda n: int(n.split("_")[2])):
        verdict = "PASS" if _ACCEPTANCE[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict} {name}")
