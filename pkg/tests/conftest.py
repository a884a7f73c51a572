import numpy as np
import pytest

from imfid.io import read_roulette
from imfid.models import TWO_PI, GaussianLocation, VonMisesRotation

ROULETTE_MLE = 0.891
ROULETTE_U = 0.711

CIRCLE_GRID = np.arange(0.0, TWO_PI, 0.01)
LINE_GRID = np.round(np.arange(-600, 601) * 0.01, 10)


@pytest.fixture
def roulette():
    return read_roulette()


@pytest.fixture
def roulette_model(roulette):
    return VonMisesRotation(kappa=2.0, n=roulette.size)


@pytest.fixture
def gaussian():
    return GaussianLocation(sigma=1.0, n=1)


@pytest.fixture
def circle_grid():
    return CIRCLE_GRID.copy()


@pytest.fixture
def line_grid():
    return LINE_GRID.copy()
