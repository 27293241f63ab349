import os

import numpy as np
import pytest

from planeform.config import Settings
from planeform.geometry import Tolerance

_SETTINGS_MODULES = (
    "planeform.config",
    "planeform.geometry",
    "planeform.formation",
    "planeform.simulation",
    "planeform.adversary",
    "planeform.models",
    "planeform.cli",
    "planeform.logging",
)


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch):
    """Fresh defaults for every test, whatever the developer's environment holds."""
    for key in list(os.environ):
        if key.upper().startswith("PLANEFORM_") and key.upper() != "PLANEFORM_SWEEP_SAMPLES":
            monkeypatch.delenv(key, raising=False)
    settings = Settings(_env_file=None)
    for module in _SETTINGS_MODULES:
        monkeypatch.setattr(f"{module}.SETTINGS", settings)
    yield settings


@pytest.fixture
def tol():
    return Tolerance()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
