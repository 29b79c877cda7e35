import numpy as np
import pytest

from lorentzcauchy.causal import FiniteLorentzianSpace, chain_space
from lorentzcauchy.mesh import build_annulus_mesh, build_disk_mesh
from lorentzcauchy.models import ConeModel


@pytest.fixture(scope="session")
def disk4():
    """Radius-1 disk at resolution 4 (331 vertices)."""
    return build_disk_mesh(1.0, 4)


@pytest.fixture(scope="session")
def cone4(disk4):
    return ConeModel.from_mesh(disk4)


@pytest.fixture(scope="session")
def disk2():
    return build_disk_mesh(1.0, 2)


@pytest.fixture(scope="session")
def cone2(disk2):
    """Small cone model for tests that loop over many graphs."""
    return ConeModel.from_mesh(disk2)


@pytest.fixture(scope="session")
def annulus():
    return build_annulus_mesh(0.5, 1.5, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def chain3():
    """a <= b <= c with unit steps."""
    return chain_space([1.0, 1.0], ["a", "b", "c"])


def diamond_points():
    # (t, x) coordinates: two spacelike middle points between a bottom and a top
    return np.array([[0.0, 0.0], [3.0, -1.0], [3.0, 2.0], [6.0, 0.0]])


@pytest.fixture
def diamond():
    """Four-point space u < x, y < v with x, y causally unrelated."""
    from lorentzcauchy.causal import minkowski_space

    return minkowski_space(diamond_points(), ["u", "x", "y", "v"])


@pytest.fixture
def two_cycle():
    return FiniteLorentzianSpace(np.zeros((2, 2)), np.ones((2, 2), dtype=bool), ("a", "b"))
