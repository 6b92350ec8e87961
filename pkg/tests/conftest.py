import numpy as np
import pytest

from app.config import config
from app.core.gas import GasModel, TransportModel
from app.schemes.base import SchemeConfig, resolve_relaxation

NU = 6.579e-4
DX = 1.0 / 40


@pytest.fixture
def gas():
    """Reference gas of the wave experiments: gamma=1.4, cp=1, c0=lambda/2."""
    return GasModel.from_sound_speed(0.5, gamma=1.4, cp=1.0)


@pytest.fixture
def transport():
    return TransportModel(nu=NU, Pr=1.0)


def make_scheme_config(n=40, gas=None, nu=NU, source="plain", s_e=None):
    gas = gas or GasModel.from_sound_speed(0.5)
    dx = 1.0 / n
    lam, nu, rates = resolve_relaxation(nu=None if s_e else nu, Pr=1.0, gamma=gas.gamma, dx=dx, lam=1.0, s_e=s_e)
    return SchemeConfig(dx=dx, lam=lam, gas=gas, transport=TransportModel(nu=nu, Pr=1.0), rates=rates, source=source)


@pytest.fixture
def scheme_config(gas):
    return make_scheme_config(40, gas)


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    """Point run output at a temporary directory."""
    monkeypatch.setattr(config, "OUTPUT_DIR", tmp_path / "runs")
    return tmp_path / "runs"


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
