import random

import pytest

from core.backends import LeviCivitaBackend, OmegaBackend, RatFuncBackend
from core.numeric import DEFAULT_CONFIG


@pytest.fixture(autouse=True)
def no_config_file(monkeypatch):
    """Field defaults only, whatever the developer's shell exports"""
    monkeypatch.delenv("BTRACK_CONFIG", raising=False)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def lc():
    return LeviCivitaBackend(DEFAULT_CONFIG)


@pytest.fixture
def omega():
    return OmegaBackend(DEFAULT_CONFIG)


@pytest.fixture
def ratfunc():
    return RatFuncBackend(DEFAULT_CONFIG)
