import numpy as np
import pytest

from app.core.errors import InvalidParameterError, ThermodynamicStateError
from app.core.gas import GasModel, TransportModel, eos


def test_reference_state_constants(gas):
    assert gas.p0 == pytest.approx(0.178571, rel=1e-5)
    assert gas.r == pytest.approx(0.4 / 1.4)
    assert gas.T0 == pytest.approx(0.625, rel=1e-12)
    assert gas.c0 == pytest.approx(0.5, rel=1e-14)


def test_eos_at_reference(gas):
    thermo = eos(np.array([gas.rho0]), np.array([gas.rho0 * gas.s0]), gas)
    assert thermo.p[0] == pytest.approx(gas.p0, rel=1e-14)
    assert thermo.T[0] == pytest.approx(gas.T0, rel=1e-14)
    assert thermo.c[0] == pytest.approx(gas.c0, rel=1e-14)


def test_eos_forms_agree(gas, rng):
    rho = rng.uniform(0.5, 2.0, 100)
    s = rng.uniform(-0.3, 0.3, 100)
    thermo = eos(rho, rho * s, gas)
    np.testing.assert_allclose(thermo.p, (gas.gamma - 1.0) * rho * thermo.i, rtol=1e-12)
    np.testing.assert_allclose(thermo.p, rho * gas.r * thermo.T, rtol=1e-12)
    np.testing.assert_allclose(thermo.c**2, gas.gamma * thermo.p / rho, rtol=1e-12)


def test_isentropic_scaling(gas):
    rho = np.array([1.0, 2.0])
    thermo = eos(rho, rho * 0.1, gas)
    assert thermo.p[1] / thermo.p[0] == pytest.approx(2.0**gas.gamma, rel=1e-13)


def test_eos_reports_first_bad_cell(gas):
    with pytest.raises(ThermodynamicStateError) as err:
        eos(np.array([1.0, 0.5, -0.1, -1.0]), np.zeros(4), gas)
    assert err.value.cell == 2
    assert "cell 2" in str(err.value)


@pytest.mark.parametrize("kwargs", [{"gamma": 1.0}, {"cp": 0.0}, {"rho0": -1.0}, {"p0": 0.0}])
def test_gas_model_validation(kwargs):
    with pytest.raises(InvalidParameterError):
        GasModel(**kwargs)


def test_transport_conductivity():
    transport = TransportModel(nu=1e-3, Pr=0.5)
    assert transport.kappa(2.0, 1.5) == pytest.approx(2.0 * 1e-3 * 1.5 / 0.5)
    with pytest.raises(InvalidParameterError):
        TransportModel(nu=1e-3, Pr=0.0)
