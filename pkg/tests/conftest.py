import numpy as np
import pytest

from nilcyl.potentials import PRESET_NAMES, preset


@pytest.fixture(scope="session")
def presets():
    """All named presets, built once per session."""
    return {name: preset(name) for name in PRESET_NAMES}


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
