import sys
from pathlib import Path

import numpy
import pytest

# The modules live at the repository root, next to entangle.py
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance scans taking more than a few seconds")


@pytest.fixture
def rng():
    return numpy.random.RandomState(0)


@pytest.fixture
def bell_state():
    """(|up up> + |down down>) / sqrt 2 over the full 2-site basis."""
    psi = numpy.zeros(4, dtype=complex)
    psi[0] = psi[3] = 1 / numpy.sqrt(2)
    return psi
