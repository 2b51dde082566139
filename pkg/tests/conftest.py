import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from rflogit.funcsample import RawCurves
from rflogit.simgen import SimConfig, generate

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def sim_data():
    """One seeded draw of the simulation design (n = 1000, 201 points)."""
    cfg = SimConfig(seed=11)
    raw, y, beta = generate(cfg, np.random.default_rng(11))
    return raw, y, beta


def make_raw(values, grid=None):
    values = np.atleast_2d(values)
    if grid is None:
        grid = np.linspace(0.0, 1.0, values.shape[1])
    return RawCurves(grid, values)


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES = {}


@pytest.fixture(scope="session")
def acceptance_report():
    def report(number, ok, detail):
        ACCEPTANCE_LINES[number] = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        return ok
    return report


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
