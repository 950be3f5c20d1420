from pathlib import Path

import pytest

from qmuse import netbackend

DATA = Path(__file__).parent / "data"

# Reference die reading [C8..C0] and the parameters it retrieves.
REFERENCE_BITS = (0, 0, 0, 0, 0, 1, 0, 0, 1)

REFERENCE_VALUES = {
    "fq1s": 310.0, "fq1e": 310.0, "fq2s": 1150.0, "fq2e": 1080.0,
    "fq3s": 2100.0, "fq3e": 2500.0, "amp1s": 0.0, "amp1e": 0.0,
    "amp2s": -11, "amp2e": -11, "amp3s": -9, "amp3e": -9,
    "bw1s": 60, "bw1e": 80, "bw2s": 75, "bw2e": 60,
    "bw3s": 115, "bw3e": 98, "fnds": 185.0, "fnde": 155.6, "dur": 2.75,
}


@pytest.fixture(scope="session")
def server():
    srv = netbackend.start_background()
    yield srv
    srv.shutdown()
    srv.server_close()


@pytest.fixture
def endpoint(server):
    return server.endpoint


def pytest_configure(config):
    config.acceptance_lines = []


def pytest_terminal_summary(terminalreporter, config):
    if config.acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(config.acceptance_lines):
            terminalreporter.write_line(line)
