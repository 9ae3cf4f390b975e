import pytest

from qcawalk import calibrate_rates


@pytest.fixture(scope="session")
def calibration():
    """One fit of the noise rates shared by every test that needs it."""
    return calibrate_rates()


@pytest.fixture(scope="session")
def calibrated_noise(calibration):
    return calibration.model
