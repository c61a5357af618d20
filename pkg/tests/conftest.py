import numpy as np
import pytest

from eitfwm import langevin
from eitfwm.params import reference_params
from eitfwm.steady_state import steady_state


@pytest.fixture(scope="session")
def ref():
    return reference_params()


@pytest.fixture(scope="session")
def ss_ref(ref):
    return steady_state(ref)


@pytest.fixture(scope="session")
def two_d_ref(ref, ss_ref):
    return langevin.diffusion_matrix(ref, ss_ref)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260817)
