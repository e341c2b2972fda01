"""Shared solves.  The h = 0.02 cross solves take about ten seconds each,
so every test module reuses them through session fixtures."""
import pytest

from robin_torsion.geometry import CrossPolygon, Disk, Ellipse, Peanut
from robin_torsion.mesh import Grading, mesh_domain
from robin_torsion.solver import RobinProblem, solve

CORNER_GRADING = Grading(0.5, 8)


def solve_on(domain, h, grading=None, beta=1.0, mode="robin"):
    return solve(RobinProblem(mesh_domain(domain, h, grading), beta, mode))


@pytest.fixture(scope="session")
def disk_coarse():
    return solve_on(Disk(), 0.1)


@pytest.fixture(scope="session")
def disk_fine():
    return solve_on(Disk(), 0.025)


@pytest.fixture(scope="session")
def ellipse_05():
    return solve_on(Ellipse(2.0, 1.0), 0.05)


@pytest.fixture(scope="session")
def peanut_05():
    return solve_on(Peanut.with_min_curvature(-0.5), 0.05)


@pytest.fixture(scope="session")
def cross_square():
    """a = b = 2 at the acceptance resolution."""
    return solve_on(CrossPolygon(2.0, 2.0), 0.02, CORNER_GRADING)


@pytest.fixture(scope="session")
def cross_tall():
    """a = 1.5, b = 3 at the acceptance resolution."""
    return solve_on(CrossPolygon(1.5, 3.0), 0.02, CORNER_GRADING)


@pytest.fixture(scope="session")
def cross_tall_coarse():
    return solve_on(CrossPolygon(1.5, 3.0), 0.05, CORNER_GRADING)
