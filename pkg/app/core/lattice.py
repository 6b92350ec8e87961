"""
Moment matrices, particle/moment conversion and the momentum-velocity tensor
shared by the D1Q3 and D1Q3Q3 schemes.

All lattice quantities are kept in lattice units with the lattice speed
``lam`` explicit. Physical units only enter through ``dx`` and ``dt``.
"""
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from app.core.errors import (
    DimensionMismatchError,
    InvalidParameterError,
    StabilityDomainError,
)

# Row layout of the D1Q3Q3 moment vector: conserved first.
RHO, J, ZETA, E, PSI, EPS = range(6)
D1Q3Q3_CONSERVED = (RHO, J, ZETA)
D1Q3Q3_NONCONSERVED = (E, PSI, EPS)

# Row layout of the D1Q3 moment vector.
D1Q3_CONSERVED = (0, 1)
D1Q3_NONCONSERVED = (2,)


@dataclass(frozen=True)
class VelocitySet:
    """Dimensionless discrete velocities and the lattice speed."""
    velocities: Tuple[int, ...]
    lam: float

    def __post_init__(self):
        if self.lam <= 0:
            raise InvalidParameterError(f"lambda={self.lam} must be positive")
        if any(v not in (-1, 0, 1) for v in self.velocities):
            raise InvalidParameterError(f"velocities {self.velocities} must lie in {{-1, 0, +1}}")

    @classmethod
    def d1q3(cls, lam: float) -> "VelocitySet":
        return cls((0, 1, -1), lam)

    @classmethod
    def d1q3q3(cls, lam: float) -> "VelocitySet":
        return cls((0, 1, -1, 0, 1, -1), lam)

    @property
    def size(self) -> int:
        return len(self.velocities)


@dataclass(frozen=True)
class MomentMatrix:
    """
    Dense particle-to-moment matrix with its precomputed inverse.

    ``entries @ f`` gives the moments of a distribution ``f`` of shape
    ``(q, n_cells)``; ``inverse @ m`` goes back.
    """
    entries: np.ndarray
    inverse: np.ndarray
    rho0: float
    cp: float = 1.0

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def to_moments(self, dist: np.ndarray) -> np.ndarray:
        return self.entries @ dist

    def to_particles(self, moments: np.ndarray) -> np.ndarray:
        return self.inverse @ moments


@dataclass(frozen=True)
class HenonMap:
    """Relaxation rates of the non-conserved moments and their Hénon coefficients."""
    s: np.ndarray
    sigma: np.ndarray = field(init=False)

    def __post_init__(self):
        s = np.atleast_1d(np.asarray(self.s, dtype=float))
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "sigma", np.array([henon_sigma(v) for v in s]))


@dataclass(frozen=True)
class LambdaTensor:
    entries: np.ndarray


def _check_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise InvalidParameterError(f"{name}={value} must be positive")


def _d1q3_block(scale: float, lam: float) -> Tuple[np.ndarray, np.ndarray]:
    """3x3 D1Q3 block and its closed-form inverse for moments (m0, m1, m2)."""
    block = scale * np.array([
        [1.0, 1.0, 1.0],
        [0.0, lam, -lam],
        [-2.0 * lam**2, lam**2, lam**2],
    ])
    inv = np.array([
        [1.0 / 3.0, 0.0, -1.0 / (3.0 * lam**2)],
        [1.0 / 3.0, 1.0 / (2.0 * lam), 1.0 / (6.0 * lam**2)],
        [1.0 / 3.0, -1.0 / (2.0 * lam), 1.0 / (6.0 * lam**2)],
    ]) / scale
    return block, inv


def build_moment_matrix_d1q3(rho0: float, lam: float) -> MomentMatrix:
    """Moments (rho, J, e) of the particle densities (f0, f+, f-)."""
    _check_positive(rho0=rho0, lam=lam)
    block, inv = _d1q3_block(rho0, lam)
    return MomentMatrix(entries=block, inverse=inv, rho0=rho0)


def build_moment_matrix_d1q3q3(rho0: float, cp: float, lam: float) -> MomentMatrix:
    """
    Moments (rho, J, zeta, e, psi, eps) of (f0, f+, f-, g0, g+, g-).

    The f block carries rows (rho, J, e), the g block scaled by cp carries
    rows (zeta, psi, eps).
    """
    _check_positive(rho0=rho0, cp=cp, lam=lam)
    f_block, f_inv = _d1q3_block(rho0, lam)
    g_block, g_inv = _d1q3_block(rho0 * cp, lam)

    f_rows, g_rows = [RHO, J, E], [ZETA, PSI, EPS]
    f_cols, g_cols = [0, 1, 2], [3, 4, 5]

    entries = np.zeros((6, 6))
    entries[np.ix_(f_rows, f_cols)] = f_block
    entries[np.ix_(g_rows, g_cols)] = g_block

    inverse = np.zeros((6, 6))
    inverse[np.ix_(f_cols, f_rows)] = f_inv
    inverse[np.ix_(g_cols, g_rows)] = g_inv

    return MomentMatrix(entries=entries, inverse=inverse, rho0=rho0, cp=cp)


def momentum_velocity_tensor(matrix: MomentMatrix, velocities: VelocitySet) -> LambdaTensor:
    """Lambda_kl = lam * sum_j M_kj v_j (M^-1)_jl."""
    if matrix.size != velocities.size:
        raise DimensionMismatchError(
            f"moment matrix is {matrix.size}x{matrix.size} but velocity set has {velocities.size} entries"
        )
    v = np.diag(np.asarray(velocities.velocities, dtype=float))
    return LambdaTensor(entries=velocities.lam * matrix.entries @ v @ matrix.inverse)


def henon_sigma(s: float) -> float:
    """Hénon coefficient sigma = 1/s - 1/2 of a relaxation rate 0 < s < 2."""
    if not 0.0 < s < 2.0:
        raise StabilityDomainError(f"relaxation rate s={s} outside (0, 2)")
    return 1.0 / s - 0.5


def sigma_to_s(sigma: float) -> float:
    if not sigma > 0.0:
        raise StabilityDomainError(f"Hénon coefficient sigma={sigma} must be positive")
    return 1.0 / (sigma + 0.5)


def relax(moments: np.ndarray, equilibria: np.ndarray, rates: Sequence[float],
          rows: Sequence[int]) -> np.ndarray:
    """m* = m + s (m_eq - m) on the given rows; other rows are left untouched."""
    out = moments.copy()
    for row, rate, eq in zip(rows, rates, equilibria):
        out[row] = moments[row] + rate * (eq - moments[row])
    return out


def second_order_flux_matrix(tensor: LambdaTensor, henon: HenonMap,
                             nonconserved: Sequence[int], dt: float) -> np.ndarray:
    """
    Weights dt * sigma_l * Lambda_kl multiplying d_x theta_l in the
    second-order equivalent equation of every conserved moment k.
    """
    weights = np.zeros_like(tensor.entries)
    for row, sigma in zip(nonconserved, henon.sigma):
        weights[:, row] = dt * sigma * tensor.entries[:, row]
    return weights
