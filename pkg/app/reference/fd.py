"""
Finite-difference reference solver of the (rho, J, zeta) Navier-Stokes system:

    d_t rho  + d_x J = 0
    d_t J    + d_x (rho u^2 + p) - d_x (rho nu d_x u) = 0
    d_t zeta + d_x (zeta u) - d_x (kappa / T d_x T) = rho nu / T (d_x u)^2 + kappa / T^2 (d_x T)^2

Centered conservative differences in space, forward Euler in time.

With the "lattice" closure the momentum diffusion is replaced by the
second-order flux the D1Q3 lattice actually carries,

    (nu / lam^2) theta_e / 3,
    theta_e / 3 = (lam^2 - u^2) d_x J - rho (2 u^2 + c^2) d_x u - 3 u d_x p,

whose linear viscosity at rest is nu (1 - c0^2 / lam^2) instead of nu.
"""
from dataclasses import dataclass, replace
from typing import List, NamedTuple, Optional

import numpy as np

from app.config import config
from app.core.errors import InvalidParameterError, SolverError, ThermodynamicStateError
from app.core.gas import GasModel, ThermoState, TransportModel, eos
from app.schemes.ns_entropy import centered_gradients, entropy_production
from app.utils.logger import logger
from app.utils.timing import timed

CLOSURES = ("navier-stokes", "lattice")


@dataclass(frozen=True)
class FDState:
    rho: np.ndarray
    J: np.ndarray
    zeta: np.ndarray
    dx: float
    t: float = 0.0
    step: int = 0

    def __post_init__(self):
        if not (self.rho.shape == self.J.shape == self.zeta.shape):
            raise InvalidParameterError(
                f"field shapes differ: {self.rho.shape}, {self.J.shape}, {self.zeta.shape}"
            )
        if self.rho.size < 3:
            raise InvalidParameterError(f"grid needs at least 3 cells, got {self.rho.size}")

    @property
    def n(self) -> int:
        return self.rho.size

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n) * self.dx

    @property
    def u(self) -> np.ndarray:
        return self.J / self.rho


class FDRates(NamedTuple):
    rho: np.ndarray
    J: np.ndarray
    zeta: np.ndarray


def _thermo(state: FDState, gas: GasModel) -> ThermoState:
    try:
        return eos(state.rho, state.zeta, gas)
    except ThermodynamicStateError as e:
        raise ThermodynamicStateError(e.reason, cell=e.cell, time=state.t) from e


def face_diffusion(a: np.ndarray, q: np.ndarray, dx: float) -> np.ndarray:
    """d_x (a d_x q) with arithmetic-mean face coefficients on a periodic grid."""
    a_face = 0.5 * (a + np.roll(a, -1))
    flux = a_face * (np.roll(q, -1) - q)
    return (flux - np.roll(flux, 1)) / dx**2


def momentum_diffusion(state: FDState, thermo: ThermoState, transport: TransportModel,
                       lam: Optional[float] = None) -> np.ndarray:
    """d_x (rho nu d_x u), or the D1Q3 second-order momentum flux when a lattice speed is given."""
    dx, u = state.dx, state.u
    if lam is None:
        return face_diffusion(state.rho * transport.nu, u, dx)
    scale = transport.nu / lam**2
    return (
        face_diffusion(scale * (lam**2 - u**2), state.J, dx)
        - face_diffusion(scale * state.rho * (2.0 * u**2 + thermo.c**2), u, dx)
        - face_diffusion(3.0 * scale * u, thermo.p, dx)
    )


def fd_rhs(state: FDState, gas: GasModel, transport: TransportModel,
           thermo: Optional[ThermoState] = None, lam: Optional[float] = None) -> FDRates:
    thermo = thermo or _thermo(state, gas)
    dx = state.dx
    u = state.u

    drho = -centered_gradients(state.J, dx)
    dJ = -centered_gradients(state.J * u + thermo.p, dx) + momentum_diffusion(state, thermo, transport, lam)

    kappa = transport.kappa(state.rho, gas.cp)
    source = entropy_production(state.rho, u, thermo.T, gas, transport, dx)
    dzeta = (
        -centered_gradients(state.zeta * u, dx)
        + face_diffusion(kappa / thermo.T, thermo.T, dx)
        + source
    )
    return FDRates(rho=drho, J=dJ, zeta=dzeta)


def fd_time_step(state: FDState, gas: GasModel, transport: TransportModel, cfl: float,
                 thermo: Optional[ThermoState] = None) -> float:
    """cfl * min(dx / max(|u| + c), dx^2 / (2 max(nu, gamma nu / Pr)))."""
    thermo = thermo or _thermo(state, gas)
    dt = state.dx / float(np.max(np.abs(state.u) + thermo.c))
    diffusivity = max(transport.nu, gas.gamma * transport.nu / transport.Pr)
    if diffusivity > 0:
        dt = min(dt, state.dx**2 / (2.0 * diffusivity))
    return cfl * dt


def fd_step(state: FDState, gas: GasModel, transport: TransportModel, dt: float,
            thermo: Optional[ThermoState] = None, lam: Optional[float] = None) -> FDState:
    rates = fd_rhs(state, gas, transport, thermo, lam)
    return replace(
        state,
        rho=state.rho + dt * rates.rho,
        J=state.J + dt * rates.J,
        zeta=state.zeta + dt * rates.zeta,
        t=state.t + dt,
        step=state.step + 1,
    )


def fd_finished(state: FDState, t_final: float) -> bool:
    return state.t >= t_final * (1.0 - 1e-14)


def fd_advance(state: FDState, gas: GasModel, transport: TransportModel, t_final: float, cfl: float,
               lam: Optional[float] = None) -> FDState:
    """One CFL-limited step towards ``t_final``, shortened to land on it."""
    thermo = _thermo(state, gas)
    dt = min(fd_time_step(state, gas, transport, cfl, thermo), t_final - state.t)
    if not dt > 0 or not np.isfinite(dt):
        raise SolverError(f"time step collapsed to {dt} at t={state.t:.6g}", step=state.step + 1)
    return fd_step(state, gas, transport, dt, thermo, lam)


def check_cfl(cfl: Optional[float]) -> float:
    cfl = config.FD_CFL if cfl is None else cfl
    if not 0.0 < cfl < 1.0:
        raise InvalidParameterError(f"cfl={cfl} outside (0, 1)")
    return cfl


@timed("FD")
def fd_run(
    initial: FDState,
    gas: GasModel,
    transport: TransportModel,
    t_final: float,
    cfl: Optional[float] = None,
    sample_every: int = 0,
    lam: Optional[float] = None,
) -> List[FDState]:
    """
    Forward-Euler trajectory up to ``t_final``; the last step is shortened to
    land on it exactly. Returns the initial state, every ``sample_every``-th
    state (0 keeps only the ends) and the final state. A lattice speed
    ``lam`` selects the lattice momentum closure.
    """
    cfl = check_cfl(cfl)
    if t_final < initial.t:
        raise InvalidParameterError(f"t_final={t_final} precedes the initial time {initial.t}")

    state = initial
    trajectory = [state]
    closure = CLOSURES[0] if lam is None else CLOSURES[1]
    logger.info(
        f"FD | Run started | N: {state.n} | t_final: {t_final:.6g} | cfl: {cfl} | "
        f"nu: {transport.nu:.6g} | Pr: {transport.Pr} | Closure: {closure}"
    )
    while not fd_finished(state, t_final):
        state = fd_advance(state, gas, transport, t_final, cfl, lam)
        if sample_every and state.step % sample_every == 0:
            trajectory.append(state)

    if trajectory[-1] is not state:
        trajectory.append(state)
    logger.info(f"FD | Run complete | Steps: {state.step} | t: {state.t:.6g}")
    return trajectory


def fd_state_from_fields(rho: np.ndarray, J: np.ndarray, zeta: np.ndarray, dx: float) -> FDState:
    return FDState(rho=np.asarray(rho, dtype=float).copy(), J=np.asarray(J, dtype=float).copy(),
                   zeta=np.asarray(zeta, dtype=float).copy(), dx=dx)
