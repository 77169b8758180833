import numpy as np
import pytest

from wasstv.grid import SpaceTimeGrid


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


GRID_SIZES = [(4, 4, 4), (8, 7, 5), (16, 16, 15)]


@pytest.fixture(params=GRID_SIZES, ids=lambda s: "x".join(map(str, s)))
def grid(request):
    n_x, n_y, n_t = request.param
    return SpaceTimeGrid(n_x, n_y, n_t)


def rel_defect(lhs, rhs):
    return abs(lhs - rhs) / (1.0 + abs(lhs))


# one line per acceptance criterion, filled in by tests/test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])
