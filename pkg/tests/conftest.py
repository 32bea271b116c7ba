"""Shared fixtures: the expensive enclosures and certificate are computed once per session."""
import time

import pytest

from bryant.certify import certify_existence, sweep_periods
from bryant.integrator import IntegrationConfig, integrate_batch
from bryant.surface import alpha1, alpha2

A = 1.78
C1, C2 = 0.0495, 0.0505
C_MID = 0.05

_ACCEPTANCE_LINES = []
TIMINGS = {}


@pytest.fixture(scope="session")
def acceptance_report():
    """Collector for the one-line acceptance verdicts printed after the run."""
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def endpoint_enclosures():
    """Interval enclosures at c = 0.0495, 0.05, 0.0505 (n = 4000) for both paths."""
    cs = [C1, C_MID, C2]
    cfg = IntegrationConfig(4000, "interval")
    return cs, integrate_batch(alpha1(A), A, cs, cfg), integrate_batch(alpha2(A), A, cs, cfg)


@pytest.fixture(scope="session")
def certificate():
    t0 = time.perf_counter()
    cert = certify_existence(A, C1, C2, 4000, 50, timestamp="fixed")
    TIMINGS["certify"] = time.perf_counter() - t0
    return cert


@pytest.fixture(scope="session")
def sweep_101():
    grid = [C1 + k * (C2 - C1) / 100 for k in range(101)]
    grid[-1] = C2
    return sweep_periods(A, grid, 4000)
