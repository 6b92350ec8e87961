"""
Isentropic D1Q3 fluid scheme: relax the energy moment, then stream.
"""
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from app.core.errors import InvalidParameterError, PositivityError, StabilityDomainError
from app.core.gas import GasModel
from app.core.lattice import MomentMatrix, VelocitySet, build_moment_matrix_d1q3, relax
from app.schemes.base import SchemeConfig

FluidEquilibrium = Callable[[np.ndarray, np.ndarray], np.ndarray]

D1Q3_DIRECTIONS = VelocitySet.d1q3(1.0).velocities


@dataclass
class FluidField:
    """Particle densities (f0, f+, f-) per ρ0 on a periodic grid x_j = j dx."""
    dist: np.ndarray
    dx: float
    matrix: MomentMatrix
    t: float = 0.0
    step: int = 0

    def __post_init__(self):
        if self.dist.ndim != 2 or self.dist.shape[0] != 3:
            raise InvalidParameterError(f"expected distributions of shape (3, N), got {self.dist.shape}")
        if self.dist.shape[1] < 4:
            raise InvalidParameterError(f"grid needs at least 4 cells, got {self.dist.shape[1]}")

    @property
    def n(self) -> int:
        return self.dist.shape[1]

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n) * self.dx

    def moments(self) -> np.ndarray:
        return self.matrix.to_moments(self.dist)

    @property
    def rho(self) -> np.ndarray:
        return self.moments()[0]

    @property
    def J(self) -> np.ndarray:
        return self.moments()[1]


def fluid_equilibrium_energy(rho, J, p, lam: float):
    """e_eq = 3 (rho u^2 + p) - 2 lam^2 rho with u = J / rho."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        bad = int(np.flatnonzero(np.atleast_1d(rho) <= 0)[0])
        raise PositivityError(f"density must be positive for the energy equilibrium (cell {bad})")
    u = J / rho
    return 3.0 * (rho * u**2 + p) - 2.0 * lam**2 * rho


def isentropic_equilibrium(gas: GasModel, lam: float) -> FluidEquilibrium:
    """Energy equilibrium with pressure taken at the reference entropy s0."""
    def equilibrium(rho, J):
        return fluid_equilibrium_energy(rho, J, gas.isentropic_pressure(rho), lam)
    return equilibrium


def stream_shift(dist: np.ndarray, directions: Sequence[int], out: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Move every row one cell along its velocity with periodic wrap.

    Reads ``dist`` and writes ``out``; the two buffers must differ.
    """
    if out is None:
        out = np.empty_like(dist)
    elif out is dist:
        raise InvalidParameterError("streaming needs distinct source and target buffers")

    for row, v in enumerate(directions):
        if v == 0:
            out[row] = dist[row]
        elif v == 1:
            out[row, 1:] = dist[row, :-1]
            out[row, 0] = dist[row, -1]
        else:
            out[row, :-1] = dist[row, 1:]
            out[row, -1] = dist[row, 0]
    return out


def fluid_collide(field: FluidField, eq: FluidEquilibrium, s_e: float) -> FluidField:
    """Relax e towards e_eq; rho and J are kept."""
    if not 0.0 < s_e < 2.0:
        raise StabilityDomainError(f"s_e={s_e} outside (0, 2)")
    m = field.moments()
    m = relax(m, [eq(m[0], m[1])], [s_e], [2])
    return replace(field, dist=field.matrix.to_particles(m))


def fluid_step(field: FluidField, config: SchemeConfig, eq: Optional[FluidEquilibrium] = None) -> FluidField:
    """One collide-and-stream time step."""
    eq = eq or isentropic_equilibrium(config.gas, config.lam)
    collided = fluid_collide(field, eq, config.rates.s_e)
    return replace(
        collided,
        dist=stream_shift(collided.dist, D1Q3_DIRECTIONS),
        t=field.t + config.dt,
        step=field.step + 1,
    )


def fluid_field_at_equilibrium(rho: np.ndarray, J: np.ndarray, config: SchemeConfig,
                               eq: Optional[FluidEquilibrium] = None) -> FluidField:
    """Distributions M^-1 (rho, J, e_eq) for given macroscopic fields."""
    matrix = build_moment_matrix_d1q3(config.gas.rho0, config.lam)
    eq = eq or isentropic_equilibrium(config.gas, config.lam)
    m = np.vstack([rho, J, eq(rho, J)])
    return FluidField(dist=matrix.to_particles(m), dx=config.dx, matrix=matrix)
