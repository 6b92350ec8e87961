from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from app.core.errors import InvalidParameterError, ThermodynamicStateError


@dataclass(frozen=True)
class GasModel:
    """
    Polytropic perfect gas around a reference state (rho0, p0, s0).

    p = (gamma - 1) rho i = rho r T = p0 (rho/rho0)^gamma exp(gamma (s - s0) / cp)
    """
    gamma: float = 1.4
    cp: float = 1.0
    rho0: float = 1.0
    p0: float = 0.25 / 1.4
    s0: float = 0.0

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise InvalidParameterError(f"gamma={self.gamma} must exceed 1")
        for name in ("cp", "rho0", "p0"):
            if not getattr(self, name) > 0:
                raise InvalidParameterError(f"{name}={getattr(self, name)} must be positive")

    @classmethod
    def from_sound_speed(cls, c0: float, gamma: float = 1.4, cp: float = 1.0,
                         rho0: float = 1.0, s0: float = 0.0) -> "GasModel":
        """Reference pressure from c0^2 = gamma p0 / rho0."""
        if not c0 > 0:
            raise InvalidParameterError(f"c0={c0} must be positive")
        return cls(gamma=gamma, cp=cp, rho0=rho0, p0=rho0 * c0**2 / gamma, s0=s0)

    @property
    def r(self) -> float:
        return self.cp * (self.gamma - 1.0) / self.gamma

    @property
    def T0(self) -> float:
        return self.p0 / (self.rho0 * self.r)

    @property
    def c0(self) -> float:
        return float(np.sqrt(self.gamma * self.p0 / self.rho0))

    @property
    def i0(self) -> float:
        return self.p0 / ((self.gamma - 1.0) * self.rho0)

    def pressure(self, rho, s):
        return self.p0 * (rho / self.rho0) ** self.gamma * np.exp(self.gamma * (s - self.s0) / self.cp)

    def isentropic_pressure(self, rho):
        return self.p0 * (rho / self.rho0) ** self.gamma


@dataclass(frozen=True)
class TransportModel:
    """Kinematic viscosity and Prandtl number; conductivity follows kappa = rho nu cp / Pr."""
    nu: float
    Pr: float = 1.0

    def __post_init__(self):
        if not self.nu >= 0:
            raise InvalidParameterError(f"nu={self.nu} must be non-negative")
        if not self.Pr > 0:
            raise InvalidParameterError(f"Pr={self.Pr} must be positive")

    def kappa(self, rho, cp: float):
        return rho * self.nu * cp / self.Pr


class ThermoState(NamedTuple):
    p: np.ndarray
    T: np.ndarray
    c: np.ndarray
    i: np.ndarray
    s: np.ndarray


def _first_bad_cell(mask: np.ndarray) -> Optional[int]:
    bad = np.flatnonzero(np.atleast_1d(mask))
    return int(bad[0]) if bad.size else None


def eos(rho, zeta, gas: GasModel) -> ThermoState:
    """Pressure, temperature, sound speed, internal energy and specific entropy from (rho, zeta)."""
    rho = np.asarray(rho, dtype=float)
    cell = _first_bad_cell(~(rho > 0))
    if cell is not None:
        raise ThermodynamicStateError(f"non-positive density {np.atleast_1d(rho)[cell]:.6g}", cell=cell)

    s = zeta / rho
    p = gas.pressure(rho, s)
    T = p / (rho * gas.r)
    cell = _first_bad_cell(~(T > 0))
    if cell is not None:
        raise ThermodynamicStateError(f"non-positive temperature {np.atleast_1d(T)[cell]:.6g}", cell=cell)

    i = p / ((gas.gamma - 1.0) * rho)
    c = np.sqrt(gas.gamma * p / rho)
    return ThermoState(p=p, T=T, c=c, i=i, s=s)
