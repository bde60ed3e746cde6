import math

import pytest

from hicp import build_complex, triangulate
from hicp.fixtures import fixture_spec
from hicp.polytope import make_angle_data


@pytest.fixture(scope="session")
def grid_torus():
    return build_complex(fixture_spec("grid-torus"))


@pytest.fixture(scope="session")
def tri_torus():
    return build_complex(fixture_spec("tri-torus"))


@pytest.fixture(scope="session")
def tri_torus_v1():
    return build_complex(fixture_spec("tri-torus-v1"))


@pytest.fixture(scope="session")
def genus2():
    return build_complex(fixture_spec("genus2"))


@pytest.fixture(scope="session")
def genus2_mixed():
    return build_complex(fixture_spec("genus2-mixed"))


@pytest.fixture(scope="session")
def dodecahedron():
    return build_complex(fixture_spec("dodecahedron"))


@pytest.fixture(scope="session")
def e0_torus():
    return build_complex(fixture_spec("e0-torus"))


@pytest.fixture(scope="session")
def grid_torus_T(grid_torus):
    return triangulate(grid_torus)


def right_angle_target(cc, geometry="euclidean"):
    """theta = pi/2 on every free edge, Theta = 2 pi on every positive
    vertex."""
    return make_angle_data(
        cc, geometry,
        {e: math.pi / 2 for e in cc.e1},
        {k: 2 * math.pi for k in cc.v1})
