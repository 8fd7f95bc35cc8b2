import numpy as np
import pytest

from libs.profile_lib import build_profile
from libs.solution_lib import solution_for


@pytest.fixture(scope='session')
def wide_profile():
    """N=3, r0=0.5: Psi' stays representable on all of (0, 1]"""
    return build_profile(3, 0.5)


@pytest.fixture(scope='session')
def sol_3_02():
    return solution_for(3, 0.2)


@pytest.fixture(scope='session')
def sol_3_01():
    return solution_for(3, 0.1)


@pytest.fixture(scope='session')
def sol_3_005():
    return solution_for(3, 0.05)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
