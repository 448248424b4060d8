import pytest

from thermagrid import Box3, HeatSource, MeshSpec, Point3

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def pair_box():
    return Box3.from_dims(5.0, 5.0, 5.0)


@pytest.fixture
def unit_pair():
    """Two unit sources one chip unit apart."""
    return [HeatSource(Point3(2.0, 2.0, 2.0), 1.0), HeatSource(Point3(3.0, 2.0, 2.0), 1.0)]


@pytest.fixture
def pair_mesh():
    # 3-per-axis lattice, spacing 0.5: exact probes at s - 0.5, s, s + 0.5,
    # so the midpoint (2.5, 2, 2) sits in both fine grids
    return MeshSpec(coarse_divisions=(1, 1, 1), fine_resolution=3, fine_extent=0.75)
