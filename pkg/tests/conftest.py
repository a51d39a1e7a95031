import numpy as np
import pytest

from cgcurves.surface import SurfaceModel

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def sphere():
    return SurfaceModel.sphere(1.0)


@pytest.fixture(scope="session")
def ellipsoid():
    return SurfaceModel.ellipsoid(1.0, 1.0, 1.3)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
