import math

import numpy as np
import pytest

from eelwrist.constraints import ConstraintParams
from eelwrist.mechanism import make_geometry
from eelwrist.workspace import SweepParams, sweep_workspace


@pytest.fixture(scope="session")
def geom():
    return make_geometry("parallel_actuators")


@pytest.fixture(scope="session")
def cparams():
    return ConstraintParams()


@pytest.fixture(scope="session")
def default_map(geom, cparams):
    return sweep_workspace(geom, cparams, SweepParams())


@pytest.fixture(scope="session")
def coarse_map(geom, cparams):
    return sweep_workspace(geom, cparams, SweepParams(n_psi=6, n_phi=12))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_rotation(rng):
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
        [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
        [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
    ])


def deg(v):
    return math.radians(v)
