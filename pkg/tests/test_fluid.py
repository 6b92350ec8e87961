import numpy as np
import pytest

from app.analysis.linear import defect_theta
from app.core.errors import InvalidParameterError, PositivityError, StabilityDomainError
from app.core.lattice import (
    D1Q3_CONSERVED,
    VelocitySet,
    build_moment_matrix_d1q3,
    momentum_velocity_tensor,
)
from app.schemes.fluid import (
    FluidField,
    fluid_collide,
    fluid_equilibrium_energy,
    fluid_field_at_equilibrium,
    fluid_step,
    isentropic_equilibrium,
    stream_shift,
)
from app.schemes.initial import acoustic_wave
from app.schemes.ns_entropy import centered_gradients
from app.services.experiment import experiment_runner
from tests.conftest import make_scheme_config


def wave_speed(snapshots, dt):
    """Phase speed of Fourier mode 1 of a sequence of density profiles on [0, 1)."""
    phases = np.unwrap([np.angle(np.fft.fft(rho)[1]) for rho in snapshots])
    slope = np.polyfit(np.arange(len(snapshots)) * dt, phases, 1)[0]
    return -slope / (2.0 * np.pi)


@pytest.mark.parametrize("rho, J, p, expected", [
    (1.0, 0.0, 0.0, -2.0),
    (1.0, 0.0, 0.25 / 1.4, -1.464286),
    (1.0, 1.0, 0.0, 1.0),
])
def test_equilibrium_energy_examples(rho, J, p, expected):
    assert fluid_equilibrium_energy(rho, J, p, 1.0) == pytest.approx(expected, abs=1e-6)


def test_equilibrium_energy_needs_positive_density():
    with pytest.raises(PositivityError):
        fluid_equilibrium_energy(np.array([1.0, 0.0]), np.zeros(2), np.zeros(2), 1.0)


def test_stream_shift_examples():
    dist = np.zeros((3, 4))
    dist[1, 0] = 1.0
    dist[2, 0] = 1.0
    dist[0] = [1.0, 2.0, 3.0, 4.0]
    out = stream_shift(dist, (0, 1, -1))
    np.testing.assert_array_equal(out[0], [1.0, 2.0, 3.0, 4.0])
    np.testing.assert_array_equal(out[1], [0.0, 1.0, 0.0, 0.0])
    np.testing.assert_array_equal(out[2], [0.0, 0.0, 0.0, 1.0])


def test_stream_shift_preserves_row_sums(rng):
    dist = rng.normal(size=(3, 11))
    out = stream_shift(dist, (0, 1, -1))
    np.testing.assert_allclose(out.sum(axis=1), dist.sum(axis=1), rtol=1e-14)


def test_stream_shift_requires_distinct_buffers():
    dist = np.ones((3, 4))
    with pytest.raises(InvalidParameterError):
        stream_shift(dist, (0, 1, -1), out=dist)


def test_field_needs_four_cells():
    matrix = build_moment_matrix_d1q3(1.0, 1.0)
    with pytest.raises(InvalidParameterError):
        FluidField(dist=np.ones((3, 3)), dx=1 / 3, matrix=matrix)


def test_collide_fixed_point_at_equilibrium(scheme_config, gas):
    rho = 1.0 + 0.1 * np.sin(np.linspace(0, 2 * np.pi, 40, endpoint=False))
    field = fluid_field_at_equilibrium(rho, 0.05 * rho, scheme_config)
    collided = fluid_collide(field, isentropic_equilibrium(gas, 1.0), 1.7)
    np.testing.assert_allclose(collided.dist, field.dist, atol=1e-15)


def test_collide_full_relaxation_and_conservation(rng, gas):
    matrix = build_moment_matrix_d1q3(1.0, 1.0)
    field = FluidField(dist=rng.uniform(0.2, 0.5, size=(3, 16)), dx=1 / 16, matrix=matrix)
    eq = isentropic_equilibrium(gas, 1.0)
    collided = fluid_collide(field, eq, 1.0)
    np.testing.assert_allclose(collided.moments()[2], eq(field.rho, field.J), rtol=1e-13)
    np.testing.assert_allclose(collided.rho, field.rho, rtol=1e-13)
    np.testing.assert_allclose(collided.J, field.J, atol=1e-13)


def test_collide_rejects_rate_outside_domain(scheme_config, gas):
    field = fluid_field_at_equilibrium(np.ones(8), np.zeros(8), scheme_config)
    with pytest.raises(StabilityDomainError):
        fluid_collide(field, isentropic_equilibrium(gas, 1.0), 2.0)


def test_uniform_state_is_a_fixed_point(scheme_config):
    field = fluid_field_at_equilibrium(np.ones(40), np.zeros(40), scheme_config)
    start = field.dist.copy()
    for _ in range(50):
        field = fluid_step(field, scheme_config)
    np.testing.assert_allclose(field.dist, start, atol=1e-13)
    assert field.step == 50
    assert field.t == pytest.approx(50 * scheme_config.dt)


def test_step_conserves_mass_and_momentum(scheme_config, gas):
    macro = acoustic_wave(40, gas, 0.01)
    field = fluid_field_at_equilibrium(macro.rho, macro.J, scheme_config)
    mass, momentum = field.rho.sum(), field.J.sum()
    for _ in range(200):
        field = fluid_step(field, scheme_config)
    assert field.rho.sum() == pytest.approx(mass, rel=1e-13)
    assert abs(field.J.sum() - momentum) <= 1e-13 * mass


def test_acoustic_wave_travels_at_sound_speed(scheme_config, gas):
    macro = acoustic_wave(40, gas, 0.001)
    field = fluid_field_at_equilibrium(macro.rho, macro.J, scheme_config)
    history = [field.rho]
    for _ in range(120):
        field = fluid_step(field, scheme_config)
        history.append(field.rho)
    assert wave_speed(history, scheme_config.dt) == pytest.approx(gas.c0, rel=0.02)


def test_defect_of_conservation_uniform_state_vanishes(gas):
    tensor = momentum_velocity_tensor(build_moment_matrix_d1q3(1.0, 1.0), VelocitySet.d1q3(1.0))
    eq = isentropic_equilibrium(gas, 1.0)

    def equilibrium(w):
        return np.vstack([w[0], w[1], eq(w[0], w[1])])

    fields = np.vstack([np.ones(20), 0.1 * np.ones(20)])
    theta = defect_theta(equilibrium, tensor, fields, 1 / 20, D1Q3_CONSERVED)
    np.testing.assert_array_equal(theta, np.zeros((1, 20)))


@pytest.mark.parametrize("u0", [0.0, 0.1])
def test_defect_of_conservation_linear_fluid(u0):
    lam, c0, n = 1.0, 0.5, 64
    dx = 1.0 / n
    tensor = momentum_velocity_tensor(build_moment_matrix_d1q3(1.0, lam), VelocitySet.d1q3(lam))
    a = 3.0 * (c0**2 - u0**2) - 2.0 * lam**2
    b = 6.0 * u0

    def equilibrium(w):
        return np.vstack([w[0], w[1], a * w[0] + b * w[1]])

    x = np.arange(n) * dx
    rho = 1.0 + 0.01 * np.sin(2 * np.pi * x)
    J = u0 * rho + 0.02 * np.cos(2 * np.pi * x)
    theta = defect_theta(equilibrium, tensor, np.vstack([rho, J]), dx, D1Q3_CONSERVED)

    expected = (3.0 * (lam**2 - 3.0 * u0**2 - c0**2) * centered_gradients(J, dx)
                - 6.0 * u0 * (c0**2 - u0**2) * centered_gradients(rho, dx))
    np.testing.assert_allclose(theta[0], expected, atol=1e-8)
    if u0 == 0.0:
        np.testing.assert_allclose(theta[0], 2.25 * lam**2 * centered_gradients(J, dx), atol=1e-8)


def test_acoustic_wave_decays_at_the_lattice_viscosity(gas):
    """The D1Q3 momentum flux carries nu (1 - c0^2 / lam^2), not nu."""
    n = 160
    config = make_scheme_config(n, gas)
    macro = acoustic_wave(n, gas, 0.001)
    field = fluid_field_at_equilibrium(macro.rho, macro.J, config)
    times, modes = [], []
    for step in range(1, 3 * n + 1):
        field = fluid_step(field, config)
        if step >= 40 and step % 10 == 0:
            # c0 rho' + J keeps only the right-going wave
            times.append(field.t)
            modes.append(np.fft.fft(gas.c0 * field.rho + field.J)[1])
    decay = -np.polyfit(times, np.log(np.abs(modes)), 1)[0]
    nu = config.transport.nu
    k = 2 * np.pi
    assert decay == pytest.approx((1.0 - gas.c0**2 / config.lam**2) * nu * k**2 / 2, rel=0.1)
    assert decay < 0.9 * nu * k**2 / 2


@pytest.mark.slow
def test_mass_drift_over_long_runs(scheme_config, gas):
    macro = acoustic_wave(40, gas, 0.01)
    field = fluid_field_at_equilibrium(macro.rho, macro.J, scheme_config)
    mass = field.rho.sum()
    for _ in range(10_000):
        field = fluid_step(field, scheme_config)
    assert abs(field.rho.sum() - mass) <= 1e-12 * mass


@pytest.mark.slow
def test_second_order_against_finite_differences():
    report = experiment_runner.run_convergence("fluid-wave", [40, 80, 160], "fd:640",
                                               overrides=["run.cfl=0.02"], fields=("rho", "J"))
    assert report.orders["rho"] >= 1.5
    assert report.orders["J"] >= 1.5
