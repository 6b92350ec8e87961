"""Initial conditions shared by the lattice schemes and the finite-difference reference."""
from typing import NamedTuple

import numpy as np

from app.core.gas import GasModel


class MacroFields(NamedTuple):
    x: np.ndarray
    rho: np.ndarray
    J: np.ndarray
    zeta: np.ndarray


def grid(n: int, length: float = 1.0) -> np.ndarray:
    """Vertices x_j = j dx of a periodic grid on [0, length)."""
    return np.arange(n) * (length / n)


def acoustic_wave(n: int, gas: GasModel, amplitude: float, length: float = 1.0) -> MacroFields:
    """
    Right-moving simple wave:
    rho = rho0 (1 + a sin 2 pi x), rho u = c0 a rho0 sin 2 pi x, s = s0.
    """
    x = grid(n, length)
    shape = np.sin(2.0 * np.pi * x / length)
    rho = gas.rho0 * (1.0 + amplitude * shape)
    J = gas.c0 * amplitude * gas.rho0 * shape
    return MacroFields(x=x, rho=rho, J=J, zeta=rho * gas.s0)


def gaussian(n: int, amplitude: float = 1.0, width: float = 0.1, center: float = 0.5,
             length: float = 1.0) -> np.ndarray:
    x = grid(n, length)
    return amplitude * np.exp(-0.5 * ((x - center) / width) ** 2)


def sine_mode(n: int, mode: int = 1, amplitude: float = 1.0, offset: float = 1.0,
              length: float = 1.0) -> np.ndarray:
    x = grid(n, length)
    return offset + amplitude * np.sin(2.0 * np.pi * mode * x / length)
