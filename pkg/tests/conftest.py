import numpy as np
import pytest

from freetime.central import HomotheticSpec
from freetime.configuration import MassSystem

TWO_BODY_A0 = np.array([[2**-0.5, 0.0], [-(2**-0.5), 0.0]])
# (9 / (2 sqrt 2))^{1/3} and (4/3) mu0^2, 30-digit mpmath evaluation
TWO_BODY_MU0 = 1.47084137671644000208258051805
TWO_BODY_ACTION_1_8 = 2.88449914061481676464327662156


@pytest.fixture
def two_body():
    return MassSystem.equal(2, 2)


@pytest.fixture
def three_body():
    return MassSystem.equal(3, 2)


@pytest.fixture
def ray(two_body):
    return HomotheticSpec.from_configuration(two_body, TWO_BODY_A0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_config(rng, sys, scale=1.0):
    """Random configuration with every pair reasonably separated."""
    while True:
        x = scale * rng.standard_normal(sys.shape)
        i, j = np.triu_indices(sys.n_bodies, 1)
        if np.linalg.norm(x[i] - x[j], axis=-1).min() > 0.2 * scale:
            return x


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.SUMMARY:
        terminalreporter.section("acceptance criteria")
        for line in mod.SUMMARY:
            terminalreporter.write_line(line)
