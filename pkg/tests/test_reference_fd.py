import numpy as np
import pytest

from app.core.errors import InvalidParameterError, ThermodynamicStateError
from app.core.gas import TransportModel, eos
from app.reference.fd import (
    FDState,
    face_diffusion,
    fd_rhs,
    fd_run,
    fd_state_from_fields,
    fd_step,
    fd_time_step,
)
from app.schemes.initial import acoustic_wave


@pytest.fixture
def wave(gas):
    macro = acoustic_wave(80, gas, 0.05)
    return fd_state_from_fields(macro.rho, macro.J, macro.zeta, 1.0 / 80)


@pytest.mark.parametrize("lam", [None, 1.0], ids=["navier-stokes", "lattice"])
def test_uniform_state_has_zero_rates(lam, gas, transport):
    state = fd_state_from_fields(np.ones(20), np.full(20, 0.1), np.full(20, 0.2), 1.0 / 20)
    rates = fd_rhs(state, gas, transport, lam=lam)
    for rate in rates:
        np.testing.assert_allclose(rate, 0.0, atol=1e-14)


def test_state_validation():
    with pytest.raises(InvalidParameterError):
        FDState(rho=np.ones(4), J=np.ones(5), zeta=np.ones(4), dx=0.25)
    with pytest.raises(InvalidParameterError):
        FDState(rho=np.ones(2), J=np.ones(2), zeta=np.ones(2), dx=0.5)


def test_face_diffusion_of_linear_coefficient():
    n = 200
    x = np.arange(n) / n
    q = np.sin(2 * np.pi * x)
    result = face_diffusion(np.ones(n), q, 1.0 / n)
    np.testing.assert_allclose(result, -(2 * np.pi) ** 2 * q, atol=1e-2)
    assert abs(result.sum()) <= 1e-9


def test_mass_rate_is_minus_momentum_gradient(gas, transport):
    n = 160
    x = np.arange(n) / n
    J = 0.01 * np.sin(2 * np.pi * x)
    state = fd_state_from_fields(np.ones(n), J, np.zeros(n), 1.0 / n)
    rates = fd_rhs(state, gas, transport)
    np.testing.assert_allclose(rates.rho, -0.02 * np.pi * np.cos(2 * np.pi * x), atol=5e-5)


@pytest.mark.parametrize("lam", [None, 1.0], ids=["navier-stokes", "lattice"])
def test_steps_conserve_mass_and_momentum(lam, wave, gas, transport):
    state = wave
    dt = fd_time_step(state, gas, transport, 0.2)
    for _ in range(50):
        state = fd_step(state, gas, transport, dt, lam=lam)
    assert state.rho.sum() == pytest.approx(wave.rho.sum(), rel=1e-13)
    assert abs(state.J.sum() - wave.J.sum()) <= 1e-12 * wave.rho.sum()
    assert state.step == 50


def test_total_entropy_never_decreases(wave, gas, transport):
    state = wave
    totals = [state.zeta.sum()]
    dt = fd_time_step(state, gas, transport, 0.2)
    for _ in range(40):
        state = fd_step(state, gas, transport, dt)
        totals.append(state.zeta.sum())
    assert np.all(np.diff(totals) >= -1e-14)


def test_inviscid_limit_keeps_entropy(wave, gas):
    inviscid = TransportModel(nu=0.0)
    rates = fd_rhs(wave, gas, inviscid)
    assert rates.zeta.sum() == pytest.approx(0.0, abs=1e-13)
    sound = eos(wave.rho, wave.zeta, gas).c
    expected = 0.5 * wave.dx / np.max(np.abs(wave.u) + sound)
    assert fd_time_step(wave, gas, inviscid, 0.5) == pytest.approx(expected)


def test_run_lands_on_final_time(wave, gas, transport):
    trajectory = fd_run(wave, gas, transport, t_final=0.1, cfl=0.3, sample_every=5)
    assert trajectory[0] is wave
    assert trajectory[-1].t == pytest.approx(0.1, rel=1e-14)
    assert all(s.step % 5 == 0 for s in trajectory[1:-1])
    assert len(trajectory) >= 3


def test_run_without_samples_keeps_the_ends(wave, gas, transport):
    trajectory = fd_run(wave, gas, transport, t_final=0.05)
    assert len(trajectory) == 2
    assert trajectory[-1].t == pytest.approx(0.05)


@pytest.mark.parametrize("cfl", [0.0, 1.0, 1.5])
def test_run_rejects_cfl_outside_unit_interval(cfl, wave, gas, transport):
    with pytest.raises(InvalidParameterError):
        fd_run(wave, gas, transport, t_final=0.1, cfl=cfl)


def test_run_reports_thermodynamic_failure_time(gas, transport):
    rho = np.ones(10)
    rho[3] = -0.5
    state = FDState(rho=rho, J=np.zeros(10), zeta=np.zeros(10), dx=0.1, t=0.25)
    with pytest.raises(ThermodynamicStateError) as err:
        fd_run(state, gas, transport, t_final=0.5)
    assert err.value.cell == 3
    assert err.value.time == 0.25


def test_lattice_closure_reduces_the_viscosity_at_rest(gas, transport):
    n = 80
    x = np.arange(n) / n
    state = fd_state_from_fields(np.ones(n), 1e-3 * np.sin(2 * np.pi * x), np.zeros(n), 1.0 / n)
    lattice = fd_rhs(state, gas, transport, lam=1.0)
    reduced = TransportModel(nu=transport.nu * (1.0 - gas.c0**2), Pr=transport.Pr)
    navier_stokes = fd_rhs(state, gas, reduced)
    np.testing.assert_allclose(lattice.J, navier_stokes.J, rtol=0, atol=1e-9)
    np.testing.assert_array_equal(lattice.rho, navier_stokes.rho)
    full = fd_rhs(state, gas, transport)
    assert np.max(np.abs(full.J - lattice.J)) > 1e-6


def right_going_mode(state, gas):
    """Fourier mode 1 of p' / (rho0 c0) + J, blind to the left-going wave and the entropy mode."""
    p = eos(state.rho, state.zeta, gas).p
    return np.fft.fft(p / (gas.rho0 * gas.c0) + state.J)[1]


@pytest.mark.slow
@pytest.mark.parametrize("lam, momentum_share", [(None, 1.0), (1.0, 0.75)], ids=["navier-stokes", "lattice"])
def test_linear_wave_speed_and_decay(lam, momentum_share, gas, transport):
    n, cfl = 640, 0.1
    macro = acoustic_wave(n, gas, 0.001)
    initial = fd_state_from_fields(macro.rho, macro.J, macro.zeta, 1.0 / n)
    trajectory = fd_run(initial, gas, transport, t_final=1.0, cfl=cfl, sample_every=100, lam=lam)

    times = np.array([s.t for s in trajectory])
    modes = np.array([right_going_mode(s, gas) for s in trajectory])
    k = 2 * np.pi
    speed = -np.polyfit(times, np.unwrap(np.angle(modes)), 1)[0] / k
    assert speed == pytest.approx(gas.c0, rel=0.01)

    # forward Euler grows a mode of frequency omega by omega^2 dt / 2 per unit time
    dt = fd_time_step(initial, gas, transport, cfl)
    decay = -np.polyfit(times, np.log(np.abs(modes)), 1)[0] + (k * gas.c0) ** 2 * dt / 2
    thermal = (gas.gamma - 1.0) * transport.nu / transport.Pr
    expected = (momentum_share * transport.nu + thermal) * k**2 / 2
    assert decay == pytest.approx(expected, rel=0.05)
