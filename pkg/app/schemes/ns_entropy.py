"""
Coupled D1Q3Q3 scheme for mass, momentum and volumic entropy.

The f distribution carries (rho, J, e), the g distribution carries
(zeta, psi, eps) with zeta = rho s. Entropy production from viscous and
thermal dissipation is added to zeta between relaxation and streaming.

One time step:
    (i)    read f_d = (f0, f+, f-, g0, g+, g-)
    (ii)   m = M f_d
    (iii)  rates from SchemeConfig (s_e from nu, s_psi from the sigma link, s_eps)
    (iv)   equilibria e_eq, psi_eq, eps_eq
    (v)    relax e, psi, eps
    (vi)   f_d* = M^-1 m*
    (vii)  add the entropy source to zeta
    (viii) stream
"""
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional, Tuple

import numpy as np

from app.core.errors import InvalidParameterError, ThermodynamicStateError
from app.core.gas import GasModel, ThermoState, TransportModel, eos
from app.core.lattice import (
    E, EPS, J, PSI, RHO, ZETA,
    MomentMatrix,
    VelocitySet,
    build_moment_matrix_d1q3q3,
    relax,
)
from app.schemes.base import SchemeConfig
from app.schemes.fluid import fluid_equilibrium_energy, stream_shift

D1Q3Q3_DIRECTIONS = VelocitySet.d1q3q3(1.0).velocities


@dataclass
class NSState:
    """Six distributions on a periodic grid plus the cached conserved moments."""
    dist: np.ndarray
    dx: float
    matrix: MomentMatrix
    t: float = 0.0
    step: int = 0
    production: Optional[np.ndarray] = None  # zeta added per cell during the last step
    rho: np.ndarray = field(init=False, repr=False)
    J: np.ndarray = field(init=False, repr=False)
    zeta: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.dist.ndim != 2 or self.dist.shape[0] != 6:
            raise InvalidParameterError(f"expected distributions of shape (6, N), got {self.dist.shape}")
        if self.dist.shape[1] < 3:
            raise InvalidParameterError(f"grid needs at least 3 cells, got {self.dist.shape[1]}")
        m = self.moments()
        self.rho, self.J, self.zeta = m[RHO], m[J], m[ZETA]

    @property
    def n(self) -> int:
        return self.dist.shape[1]

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n) * self.dx

    @property
    def u(self) -> np.ndarray:
        return self.J / self.rho

    def moments(self) -> np.ndarray:
        return self.matrix.to_moments(self.dist)


class Diagnostics(NamedTuple):
    total_mass: float
    total_momentum: float
    total_energy: float
    total_entropy: float


def ns_equilibria(rho, J, zeta, gas: GasModel, lam: float,
                  thermo: Optional[ThermoState] = None) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    e_eq = 3 (rho u^2 + p) - 2 lam^2 rho
    psi_eq = zeta u
    eps_eq = (2 rho cp lam^2 / gamma) log(T / T0) + e_eq s
    """
    thermo = thermo or eos(rho, zeta, gas)
    u = J / rho
    e_eq = fluid_equilibrium_energy(rho, J, thermo.p, lam)
    psi_eq = zeta * u
    eps_eq = 2.0 * rho * gas.cp * lam**2 / gas.gamma * np.log(thermo.T / gas.T0) + e_eq * thermo.s
    return e_eq, psi_eq, eps_eq


def eps_equilibrium_perfect_gas(rho, J, zeta, gas: GasModel, lam: float) -> np.ndarray:
    """Entropy-energy equilibrium written out for the polytropic gas."""
    s = zeta / rho
    u = J / rho
    p = gas.pressure(rho, s)
    e_eq = 3.0 * (rho * u**2 + p) - 2.0 * lam**2 * rho
    return (
        2.0 * lam**2 * (rho * (s - gas.s0) + (1.0 - 1.0 / gas.gamma) * gas.cp * rho * np.log(rho / gas.rho0))
        + e_eq * s
    )


def centered_gradients(q: np.ndarray, dx: float) -> np.ndarray:
    """(q_{j+1} - q_{j-1}) / (2 dx) with periodic wrap."""
    if q.size < 3:
        raise InvalidParameterError(f"centered gradients need at least 3 cells, got {q.size}")
    return (np.roll(q, -1) - np.roll(q, 1)) / (2.0 * dx)


def entropy_production(rho, u, T, gas: GasModel, transport: TransportModel, dx: float) -> np.ndarray:
    """S = (rho nu / T) (d_x u)^2 + (kappa / T^2) (d_x T)^2."""
    du = centered_gradients(u, dx)
    dT = centered_gradients(T, dx)
    kappa = transport.kappa(rho, gas.cp)
    return rho * transport.nu / T * du**2 + kappa / T**2 * dT**2


def entropy_source(state: NSState, gas: GasModel, transport: TransportModel) -> np.ndarray:
    thermo = _thermo(state.rho, state.zeta, gas, state.t)
    return entropy_production(state.rho, state.u, thermo.T, gas, transport, state.dx)


def _thermo(rho, zeta, gas: GasModel, t: float) -> ThermoState:
    try:
        return eos(rho, zeta, gas)
    except ThermodynamicStateError as e:
        raise ThermodynamicStateError(e.reason, cell=e.cell, time=t) from e


def ns_step(state: NSState, config: SchemeConfig) -> NSState:
    gas, lam, dt, rates = config.gas, config.lam, config.dt, config.rates

    m = state.matrix.to_moments(state.dist)
    rho, mom = m[RHO], m[J]
    thermo = _thermo(rho, m[ZETA], gas, state.t)

    source = np.zeros_like(rho)
    if config.source != "none":
        S = entropy_production(rho, mom / rho, thermo.T, gas, config.transport, state.dx)
        if config.source == "split":
            half = 0.5 * dt * S
            m[ZETA] += half
            source += half
            thermo = _thermo(rho, m[ZETA], gas, state.t)
        else:
            source = dt * S

    e_eq, psi_eq, eps_eq = ns_equilibria(rho, mom, m[ZETA], gas, lam, thermo)
    m = relax(m, (e_eq, psi_eq, eps_eq), (rates.s_e, rates.s_psi, rates.s_eps), (E, PSI, EPS))

    if config.source == "plain":
        m[ZETA] += source
    elif config.source == "split":
        post = _thermo(rho, m[ZETA], gas, state.t)
        half = 0.5 * dt * entropy_production(rho, mom / rho, post.T, gas, config.transport, state.dx)
        m[ZETA] += half
        source += half

    collided = state.matrix.to_particles(m)
    return replace(
        state,
        dist=stream_shift(collided, D1Q3Q3_DIRECTIONS),
        t=state.t + dt,
        step=state.step + 1,
        production=source,
    )


def ns_state_at_equilibrium(rho: np.ndarray, J: np.ndarray, zeta: np.ndarray,
                            config: SchemeConfig) -> NSState:
    """f_d = M^-1 (rho, J, zeta, e_eq, psi_eq, eps_eq)."""
    matrix = build_moment_matrix_d1q3q3(config.gas.rho0, config.gas.cp, config.lam)
    e_eq, psi_eq, eps_eq = ns_equilibria(rho, J, zeta, config.gas, config.lam)
    m = np.vstack([rho, J, zeta, e_eq, psi_eq, eps_eq])
    return NSState(dist=matrix.to_particles(m), dx=config.dx, matrix=matrix)


def diagnostics(state: NSState, gas: GasModel) -> Diagnostics:
    """Grid totals of rho, J, rho E = rho (i + u^2/2) and zeta, each times dx."""
    thermo = eos(state.rho, state.zeta, gas)
    energy = state.rho * (thermo.i + 0.5 * state.u**2)
    return Diagnostics(
        total_mass=float(np.sum(state.rho) * state.dx),
        total_momentum=float(np.sum(state.J) * state.dx),
        total_energy=float(np.sum(energy) * state.dx),
        total_entropy=float(np.sum(state.zeta) * state.dx),
    )
