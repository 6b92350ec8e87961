"""
Linear analysis of the D1Q3Q3 scheme: linearized equilibria around a
reference state, von Neumann amplification scans and defects of
conservation.
"""
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from app.config import config as app_config
from app.core.errors import InvalidParameterError, SolverError
from app.core.gas import GasModel
from app.core.lattice import (
    D1Q3Q3_CONSERVED,
    D1Q3Q3_NONCONSERVED,
    E,
    J,
    PSI,
    ZETA,
    LambdaTensor,
    MomentMatrix,
    VelocitySet,
    build_moment_matrix_d1q3q3,
    momentum_velocity_tensor,
    second_order_flux_matrix,
)
from app.schemes.base import RelaxationRates, SchemeConfig
from app.schemes.ns_entropy import centered_gradients, ns_equilibria
from app.utils.logger import logger


@dataclass(frozen=True)
class ReferenceState:
    rho0: float
    u0: float
    s0: float
    c0: float

    def __post_init__(self):
        if not self.c0 > 0 or not self.rho0 > 0:
            raise InvalidParameterError(f"reference state needs rho0 > 0 and c0 > 0, got {self}")

    @property
    def conserved(self) -> np.ndarray:
        return np.array([self.rho0, self.rho0 * self.u0, self.rho0 * self.s0])

    def anchored_gas(self, gas: GasModel) -> GasModel:
        """Gas whose reference point is this state, so that c(rho0, s0) = c0."""
        return replace(gas, rho0=self.rho0, p0=self.rho0 * self.c0**2 / gas.gamma, s0=self.s0)


@dataclass(frozen=True)
class LinearEquilibria:
    """Rows giving e_eq, psi_eq and eps_eq as linear forms of (rho, J, zeta)."""
    e: np.ndarray
    psi: np.ndarray
    eps: np.ndarray

    def matrix(self) -> np.ndarray:
        return np.vstack([self.e, self.psi, self.eps])


class EquilibriumDiscrepancy(NamedTuple):
    printed: LinearEquilibria
    jacobian: LinearEquilibria
    gaps: np.ndarray
    max_gap: float
    consistent: bool


@dataclass(frozen=True)
class StabilityReport:
    k_dx: np.ndarray
    spectral_radius: np.ndarray
    max_radius: float
    tolerance: float

    @property
    def stable(self) -> bool:
        return self.max_radius <= 1.0 + self.tolerance

    @property
    def verdict(self) -> str:
        return "stable" if self.stable else "unstable"

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"k_dx": self.k_dx, "spectral_radius": self.spectral_radius})

    def to_csv(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False, float_format=f"%.{app_config.CSV_SIGNIFICANT_DIGITS}g")
        return path


def _check_subsonic(ref: ReferenceState, lam: float) -> None:
    if not abs(ref.u0) < lam:
        raise InvalidParameterError(f"|u0|={abs(ref.u0)} must stay below lambda={lam}")


def linearized_equilibria(ref: ReferenceState, gas: GasModel, lam: float) -> LinearEquilibria:
    """Linear equilibria exactly as printed for the linearized Navier-Stokes system."""
    _check_subsonic(ref, lam)
    u0, s0, c0, cp, gamma = ref.u0, ref.s0, ref.c0, gas.cp, gas.gamma
    return LinearEquilibria(
        e=np.array([3.0 * (1.0 - s0 / cp) * c0**2 - 3.0 * u0**2 - 2.0 * lam**2, 6.0 * u0, 3.0 * u0**2 / cp]),
        psi=np.array([-u0 * s0, s0, u0]),
        eps=np.array([
            -3.0 * (s0 * c0) ** 2 - 6.0 * s0 * u0**2 + 3.0 * s0 * c0**2 + 2.0 - 2.0 * s0 - 2.0 / gamma,
            6.0 * u0 * s0,
            3.0 * (cp * u0**2 + s0 * c0**2),
        ]),
    )


def jacobian_equilibria(ref: ReferenceState, gas: GasModel, lam: float) -> LinearEquilibria:
    """Closed-form Jacobian of the nonlinear equilibria at the reference state."""
    _check_subsonic(ref, lam)
    rho0, u0, s0, c0 = ref.rho0, ref.u0, ref.s0, ref.c0
    gamma, cp = gas.gamma, gas.cp
    p0 = rho0 * c0**2 / gamma
    e0_over_rho = 3.0 * (u0**2 + p0 / rho0) - 2.0 * lam**2
    a = 2.0 * cp * lam**2 / gamma

    e_row = np.array([3.0 * (c0**2 * (1.0 - s0 / cp) - u0**2) - 2.0 * lam**2, 6.0 * u0, 3.0 * c0**2 / cp])
    psi_row = np.array([-s0 * u0, s0, u0])
    eps_row = np.array([
        a * ((gamma - 1.0) - gamma * s0 / cp) + s0 * e_row[0] - s0 * e0_over_rho,
        s0 * e_row[1],
        2.0 * lam**2 + s0 * e_row[2] + e0_over_rho,
    ])
    return LinearEquilibria(e=e_row, psi=psi_row, eps=eps_row)


def numerical_jacobian(ref: ReferenceState, gas: GasModel, lam: float, h: float = 1e-6) -> LinearEquilibria:
    """Central finite-difference Jacobian of the nonlinear equilibria."""
    anchored = ref.anchored_gas(gas)
    w0 = ref.conserved
    jac = np.zeros((3, 3))
    for k in range(3):
        step = h * max(1.0, abs(w0[k]))
        plus, minus = w0.copy(), w0.copy()
        plus[k] += step
        minus[k] -= step
        f_plus = np.array(ns_equilibria(*plus, anchored, lam), dtype=float)
        f_minus = np.array(ns_equilibria(*minus, anchored, lam), dtype=float)
        jac[:, k] = (f_plus - f_minus) / (2.0 * step)
    return LinearEquilibria(e=jac[0], psi=jac[1], eps=jac[2])


def equilibrium_discrepancy(ref: ReferenceState, gas: GasModel, lam: float,
                            tolerance: float = 1e-8) -> EquilibriumDiscrepancy:
    """
    Compare the printed linear equilibria with the Jacobian of the nonlinear
    ones. Gaps are relative to |entry| + 1.
    """
    printed = linearized_equilibria(ref, gas, lam)
    jacobian = jacobian_equilibria(ref, gas, lam)
    gaps = np.abs(printed.matrix() - jacobian.matrix()) / (np.abs(jacobian.matrix()) + 1.0)
    max_gap = float(gaps.max())
    consistent = max_gap <= tolerance
    if not consistent:
        rows, cols = np.nonzero(gaps > tolerance)
        entries = ", ".join(f"{('e', 'psi', 'eps')[r]}/{('rho', 'J', 'zeta')[c]}" for r, c in zip(rows, cols))
        logger.warning(
            f"STABILITY | Printed linear equilibria differ from Jacobian | "
            f"Max gap: {max_gap:.3g} | Entries: {entries}"
        )
    return EquilibriumDiscrepancy(printed, jacobian, gaps, max_gap, consistent)


def relaxation_matrix(lin: LinearEquilibria, rates: RelaxationRates) -> np.ndarray:
    """Moment-space collision: identity on conserved rows, relaxation to linear equilibria elsewhere."""
    eq = np.zeros((6, 6))
    eq[np.ix_(D1Q3Q3_NONCONSERVED, D1Q3Q3_CONSERVED)] = lin.matrix()
    s = np.zeros(6)
    s[list(D1Q3Q3_NONCONSERVED)] = (rates.s_e, rates.s_psi, rates.s_eps)
    for row in D1Q3Q3_CONSERVED:
        eq[row, row] = 1.0
    return np.eye(6) + np.diag(s) @ (eq - np.eye(6))


def implied_alpha(rates: RelaxationRates, gamma: float, Pr: float, u0: float, lam: float) -> float:
    """
    Entropy-energy coefficient alpha the coupled rates imply for the zeta
    sub-lattice: 3 (gamma/Pr sigma_e/sigma_psi - 2/3 + u0^2/lam^2).
    """
    return 3.0 * (gamma / Pr * rates.sigma_e / rates.sigma_psi - 2.0 / 3.0 + u0**2 / lam**2)


class TransportPrediction(NamedTuple):
    nu: float
    nu_effective: float
    zeta_diffusivity: float


def predicted_transport(config: SchemeConfig, ref: ReferenceState) -> TransportPrediction:
    """
    Second-order transport coefficients of the coupled scheme, linearized at
    the reference state, from the weights dt sigma_l Lambda_kl.

    ``nu`` uses theta_e ~ 3 lam^2 d_x J, ``nu_effective`` the full linear
    defect 3 (lam^2 - 3 u0^2 - c0^2) d_x J. ``zeta_diffusivity`` holds for
    s0 = 0 with the alpha implied by the relaxation rates.
    """
    lam, u0, c0 = config.lam, ref.u0, ref.c0
    matrix = build_moment_matrix_d1q3q3(config.gas.rho0, config.gas.cp, lam)
    tensor = momentum_velocity_tensor(matrix, VelocitySet.d1q3q3(lam))
    weights = second_order_flux_matrix(tensor, config.rates.henon, D1Q3Q3_NONCONSERVED, config.dt)

    alpha = implied_alpha(config.rates, config.gas.gamma, config.transport.Pr, u0, lam)
    return TransportPrediction(
        nu=float(3.0 * weights[J, E] * lam**2),
        nu_effective=float(3.0 * weights[J, E] * (lam**2 - 3.0 * u0**2 - c0**2)),
        zeta_diffusivity=float(weights[ZETA, PSI] * (2.0 / 3.0 * lam**2 - u0**2 + alpha * lam**2 / 3.0)),
    )


def amplification_matrix(k_dx: float, matrix: MomentMatrix, velocities: VelocitySet,
                         lin: LinearEquilibria, rates: RelaxationRates) -> np.ndarray:
    """One-step amplification G(k) = A(k) M^-1 R M in particle space."""
    collision = matrix.inverse @ relaxation_matrix(lin, rates) @ matrix.entries
    phase = np.exp(-1j * k_dx * np.asarray(velocities.velocities, dtype=float))
    return phase[:, None] * collision


def _eigenvalues(g: np.ndarray, k_dx: float) -> np.ndarray:
    try:
        return np.linalg.eigvals(g)
    except np.linalg.LinAlgError as e:
        raise SolverError(f"eigenvalue computation failed at k_dx={k_dx:.6g}: {e}") from e


def amplification_scan(config: SchemeConfig, lin: LinearEquilibria,
                       k_samples: Optional[int] = None,
                       tolerance: Optional[float] = None) -> StabilityReport:
    k_samples = k_samples or app_config.STABILITY_SAMPLES
    tolerance = app_config.STABILITY_TOLERANCE if tolerance is None else tolerance

    matrix = build_moment_matrix_d1q3q3(config.gas.rho0, config.gas.cp, config.lam)
    velocities = VelocitySet.d1q3q3(config.lam)
    k_dx = np.linspace(np.pi / k_samples, np.pi, k_samples)

    radius = np.array([
        np.max(np.abs(_eigenvalues(amplification_matrix(k, matrix, velocities, lin, config.rates), k)))
        for k in k_dx
    ])
    report = StabilityReport(k_dx=k_dx, spectral_radius=radius, max_radius=float(radius.max()), tolerance=tolerance)
    logger.info(
        f"STABILITY | Scan complete | Samples: {k_samples} | "
        f"Max radius: {report.max_radius:.15f} | Verdict: {report.verdict}"
    )
    return report


def spectral_radius(k_dx: float, config: SchemeConfig, lin: LinearEquilibria) -> float:
    matrix = build_moment_matrix_d1q3q3(config.gas.rho0, config.gas.cp, config.lam)
    g = amplification_matrix(k_dx, matrix, VelocitySet.d1q3q3(config.lam), lin, config.rates)
    return float(np.max(np.abs(_eigenvalues(g, k_dx))))


def acoustic_phases(k_dx: float, config: SchemeConfig, lin: LinearEquilibria) -> Tuple[float, float]:
    """
    Arguments of the two acoustic eigenvalues at small k: among the three
    eigenvalues closest to the unit circle, the two with largest |arg|.
    """
    matrix = build_moment_matrix_d1q3q3(config.gas.rho0, config.gas.cp, config.lam)
    g = amplification_matrix(k_dx, matrix, VelocitySet.d1q3q3(config.lam), lin, config.rates)
    eig = _eigenvalues(g, k_dx)
    slow = eig[np.argsort(-np.abs(eig))[:3]]
    args = np.angle(slow)
    acoustic = args[np.argsort(-np.abs(args))[:2]]
    return float(acoustic.max()), float(acoustic.min())


def defect_theta(
    equilibrium: Callable[[np.ndarray], np.ndarray],
    tensor: LambdaTensor,
    fields: np.ndarray,
    dx: float,
    conserved: Sequence[int],
) -> np.ndarray:
    """
    theta_l = d_t m_l^eq + sum_p Lambda_lp d_x m_p^eq for every non-conserved l.

    ``equilibrium`` maps conserved fields (k, N) to all equilibrium moments
    (q, N). The time derivative is eliminated with the first-order
    equations d_t W_k = -sum_p Lambda_kp d_x m_p^eq and a directional
    difference of the equilibrium map.
    """
    conserved = list(conserved)
    lam_t = tensor.entries
    m_eq = equilibrium(fields)
    grad = np.vstack([centered_gradients(row, dx) for row in m_eq])
    flux = lam_t @ grad

    dw_dt = -flux[conserved]
    scale = np.max(np.abs(dw_dt))
    if scale == 0.0:
        dm_dt = np.zeros_like(m_eq)
    else:
        h = 1e-6 * (np.max(np.abs(fields)) + 1.0) / scale
        dm_dt = (equilibrium(fields + h * dw_dt) - equilibrium(fields - h * dw_dt)) / (2.0 * h)

    nonconserved = [row for row in range(m_eq.shape[0]) if row not in conserved]
    return dm_dt[nonconserved] + flux[nonconserved]
