import numpy as np
import pytest

from spdc_studio import fixtures
from spdc_studio.optics import (CrystalSpec, FrequencyGrid, PumpSpec,
                                compute_jsa)


@pytest.fixture(scope="session")
def default_pump():
    return PumpSpec()


@pytest.fixture(scope="session")
def default_crystal():
    return CrystalSpec()


@pytest.fixture(scope="session")
def default_jsa(default_pump, default_crystal):
    grid = FrequencyGrid.wavelength_window(1500e-9, 1620e-9, 512)
    return compute_jsa(grid, default_crystal, default_pump)


@pytest.fixture(scope="session")
def measured_jsi():
    return fixtures.load_measured_jsi()


@pytest.fixture(scope="session")
def reference_state():
    return fixtures.load_reference_state()


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
