import os

import pytest
from hypothesis import HealthCheck, settings

from hcblocks.blocks import ext_relation
from hcblocks.gwa import glued_pair

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# lines printed at the end of the run by the acceptance tests
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def glued_small():
    """Glued pair on the points (-2,0), (0,0), (2,0) at order 3, with its Ext relation."""
    pp = glued_pair(1, 3)
    return pp, ext_relation(pp.gamma)
