import numpy as np
import pytest

from polydg.mesh import build_mesh, generate_dual_hex, generate_hybrid

# one line per acceptance criterion, filled by tests/test_acceptance.py
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


def unit_square_mesh(scale=1.0):
    v = scale * np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    return build_mesh(v, [[0, 1, 2, 3]])


def two_squares_mesh():
    v = [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1)]
    return build_mesh(v, [[0, 1, 4, 3], [1, 2, 5, 4]])


def hanging_mesh():
    """A unit square left of two stacked 1 x 1/2 rectangles."""
    v = [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1), (1, 0.5), (2, 0.5)]
    return build_mesh(v, [[0, 1, 4, 3], [1, 2, 7, 6], [6, 7, 5, 4]])


@pytest.fixture
def unit_square():
    return unit_square_mesh()


@pytest.fixture
def two_squares():
    return two_squares_mesh()


@pytest.fixture(scope="session")
def dualhex4():
    return generate_dual_hex(4)


@pytest.fixture(scope="session")
def dualhex8():
    return generate_dual_hex(8)


@pytest.fixture(scope="session")
def hybrid4():
    return generate_hybrid(4)


@pytest.fixture(scope="session", params=["dualhex", "hybrid"])
def small_mesh(request):
    return generate_dual_hex(4) if request.param == "dualhex" else generate_hybrid(4)
