import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import distance_for_capacity  # noqa: E402
from qnrobust import GeoGraph  # noqa: E402


def geo(coords, edges, R=1000.0):
    return GeoGraph(np.asarray(coords, dtype=float), np.asarray(edges, dtype=np.int64).reshape(-1, 2), R)


@pytest.fixture
def triangle():
    return geo([(0, 0), (10, 0), (5, 8)], [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def k4():
    return geo([(0, 0), (10, 0), (0, 10), (10, 10)], [(i, j) for i in range(4) for j in range(i + 1, 4)])


@pytest.fixture
def star():
    """K_{1,4}: hub 0 at the origin, four leaves at equal distance."""
    return geo([(0, 0), (20, 0), (0, 20), (-20, 0), (0, -20)], [(0, i) for i in range(1, 5)])


@pytest.fixture
def path_12():
    """Path a-b-c on a line with edge capacities 1 and 2."""
    d1, d2 = distance_for_capacity(1.0), distance_for_capacity(2.0)
    return geo([(0, 0), (d1, 0), (d1 + d2, 0)], [(0, 1), (1, 2)])


@pytest.fixture
def two_triangles_and_isolated():
    c = [(0, 0), (5, 0), (0, 5), (100, 100), (105, 100), (100, 105), (-300, -300)]
    return geo(c, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])




# Acceptance criteria register their verdicts here; the summary hook prints
# one line per criterion after the run.
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
