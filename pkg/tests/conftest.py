import numpy as np
import pytest

from qutritcr.device import DeviceParams
from qutritcr.experiments import ExperimentConfig, cmd_calibrate


@pytest.fixture(scope="session")
def device():
    return DeviceParams()


@pytest.fixture(scope="session")
def config():
    return ExperimentConfig()


@pytest.fixture(scope="session")
def cal_store(config, tmp_path_factory):
    """Full calibrated gate set; built once per session (takes a few minutes)."""
    path = tmp_path_factory.mktemp("cal") / "cal.json"
    return cmd_calibrate(config, str(path), verbose=False)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
