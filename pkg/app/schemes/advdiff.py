"""
Scalar advection-diffusion with a D1Q3 MRT scheme.

Moments (zeta, psi, eps) of (g0, g+, g-); only zeta is conserved. The
equilibria are psi_eq = u0 zeta and eps_eq = alpha lam^2 zeta, and the
diffusivity obeys ((2 + alpha)/3 lam^2 - u0^2) sigma_psi dt = kappa.
"""
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from app.core.errors import ClosureInfeasibleError, InvalidParameterError
from app.core.lattice import MomentMatrix, build_moment_matrix_d1q3, henon_sigma, relax, sigma_to_s
from app.schemes.fluid import D1Q3_DIRECTIONS, stream_shift
from app.utils.logger import logger

ALPHA_BOUNDS = (-2.0, 1.0)


@dataclass
class AdvDiffField:
    dist: np.ndarray
    dx: float
    matrix: MomentMatrix
    t: float = 0.0
    step: int = 0

    @property
    def n(self) -> int:
        return self.dist.shape[1]

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n) * self.dx

    @property
    def zeta(self) -> np.ndarray:
        return self.matrix.to_moments(self.dist)[0]


@dataclass(frozen=True)
class AdvDiffParams:
    u0: float
    kappa: float
    alpha: float
    s_psi: float
    lam: float
    dt: float
    s_eps: float = 1.5

    @property
    def sigma_psi(self) -> float:
        return henon_sigma(self.s_psi)

    def closure_kappa(self) -> float:
        """Diffusivity implied by (alpha, s_psi)."""
        return ((2.0 + self.alpha) / 3.0 * self.lam**2 - self.u0**2) * self.sigma_psi * self.dt


def resolve_advdiff_params(
    u0: float,
    kappa: float,
    lam: float,
    dt: float,
    alpha: Optional[float] = None,
    s_psi: Optional[float] = None,
    s_eps: float = 1.5,
) -> AdvDiffParams:
    """
    Solve the diffusivity closure for the free member of (alpha, s_psi).

    Fixing alpha (the default, alpha = 0) solves for s_psi; fixing s_psi
    solves for alpha.
    """
    if not kappa > 0:
        raise ClosureInfeasibleError(f"kappa={kappa} must be positive")
    if not lam > 0 or not dt > 0:
        raise InvalidParameterError(f"lambda={lam} and dt={dt} must be positive")
    if alpha is not None and s_psi is not None:
        raise InvalidParameterError("fix either alpha or s_psi, not both")
    if not 0.0 < s_eps < 2.0:
        raise ClosureInfeasibleError(f"s_eps={s_eps} outside (0, 2)")

    if s_psi is None:
        alpha = 0.0 if alpha is None else alpha
        if not ALPHA_BOUNDS[0] < alpha < ALPHA_BOUNDS[1]:
            raise ClosureInfeasibleError(f"alpha={alpha} outside (-2,1)")
        speed2 = (2.0 + alpha) / 3.0 * lam**2 - u0**2
        if speed2 <= 0:
            raise ClosureInfeasibleError(
                f"u0^2={u0**2:.6g} reaches (2+alpha) lambda^2/3={speed2 + u0**2:.6g}; kappa would vanish"
            )
        sigma_psi = kappa / (speed2 * dt)
        s_psi = sigma_to_s(sigma_psi)
    else:
        if not 0.0 < s_psi < 2.0:
            raise ClosureInfeasibleError(f"s_psi={s_psi} outside (0,2)")
        sigma_psi = henon_sigma(s_psi)
        alpha = 3.0 * (kappa / (sigma_psi * dt) + u0**2) / lam**2 - 2.0
        if not ALPHA_BOUNDS[0] < alpha < ALPHA_BOUNDS[1]:
            raise ClosureInfeasibleError(f"alpha={alpha:.6g} outside (-2,1)")

    params = AdvDiffParams(u0=u0, kappa=kappa, alpha=alpha, s_psi=s_psi, lam=lam, dt=dt, s_eps=s_eps)
    logger.debug(
        f"ADVDIFF | Closure resolved | kappa: {kappa:.6g} | alpha: {alpha:.6g} | "
        f"s_psi: {s_psi:.6g} | s_eps: {s_eps:.6g}"
    )
    return params


def advdiff_equilibria(zeta, u0: float, alpha: float, lam: float) -> Tuple[np.ndarray, np.ndarray]:
    return u0 * zeta, alpha * lam**2 * zeta


def advdiff_step(field: AdvDiffField, params: AdvDiffParams) -> AdvDiffField:
    m = field.matrix.to_moments(field.dist)
    psi_eq, eps_eq = advdiff_equilibria(m[0], params.u0, params.alpha, params.lam)
    m = relax(m, (psi_eq, eps_eq), (params.s_psi, params.s_eps), (1, 2))
    return replace(
        field,
        dist=stream_shift(field.matrix.to_particles(m), D1Q3_DIRECTIONS),
        t=field.t + params.dt,
        step=field.step + 1,
    )


def advdiff_field_at_equilibrium(zeta: np.ndarray, params: AdvDiffParams, dx: float,
                                 zeta0: float = 1.0) -> AdvDiffField:
    """Start from (zeta, psi_eq, eps_eq). zeta0 is 1 standalone, rho0 cp when coupled."""
    matrix = build_moment_matrix_d1q3(zeta0, params.lam)
    psi_eq, eps_eq = advdiff_equilibria(zeta, params.u0, params.alpha, params.lam)
    return AdvDiffField(dist=matrix.to_particles(np.vstack([zeta, psi_eq, eps_eq])), dx=dx, matrix=matrix)


def heat_kernel_solution(zeta_initial: np.ndarray, u0: float, kappa: float, t: float,
                         length: float = 1.0) -> np.ndarray:
    """Exact periodic solution of d_t zeta + u0 d_x zeta = kappa d_xx zeta via Fourier series."""
    n = zeta_initial.size
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=length / n)
    modes = np.fft.fft(zeta_initial) * np.exp(-kappa * k**2 * t - 1j * k * u0 * t)
    return np.real(np.fft.ifft(modes))
