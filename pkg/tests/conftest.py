import numpy  as np
import pytest

from clslvr.inputoutput import set_verbosity
from clslvr.maps        import RigidRotation, StandardMap, LinearSaddle, \
                               PolarTwist, GOLDEN


@pytest.fixture(autouse=True)
def quiet():
	set_verbosity(False)
	yield
	set_verbosity(True)


@pytest.fixture
def rotation():
	return RigidRotation(0.1)


@pytest.fixture
def golden_rotation():
	return RigidRotation(GOLDEN)


@pytest.fixture
def twist():
	return PolarTwist(0.1, 0.2)


@pytest.fixture
def saddle():
	return LinearSaddle(2.0)


@pytest.fixture
def standard():
	return StandardMap(6.0)


@pytest.fixture
def small_grid():
	return 8
