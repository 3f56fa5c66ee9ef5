import sys

import pytest
from hypothesis import HealthCheck, settings

from triperiod import RepParams

settings.register_profile("default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def p():
    return RepParams(0.3j, 0.7j)


def pytest_terminal_summary(terminalreporter):
    mods = [m for name, m in sys.modules.items() if name.endswith("test_acceptance")]
    lines = getattr(mods[0], "LINES", {}) if mods else {}
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])
