from dataclasses import dataclass
from typing import Optional, Tuple

from app.core.errors import InvalidParameterError, StabilityDomainError
from app.core.gas import GasModel, TransportModel
from app.core.lattice import HenonMap, henon_sigma, sigma_to_s
from app.utils.logger import logger

SOURCE_VARIANTS = ("none", "plain", "split")

# Relative tolerance when nu and s_e are both prescribed.
NU_CONSISTENCY_RTOL = 1e-3


@dataclass(frozen=True)
class RelaxationRates:
    s_e: float
    s_psi: float = 1.0
    s_eps: float = 1.5

    def __post_init__(self):
        for name in ("s_e", "s_psi", "s_eps"):
            value = getattr(self, name)
            if not 0.0 < value < 2.0:
                raise StabilityDomainError(f"{name}={value} outside (0, 2)")

    @property
    def henon(self) -> HenonMap:
        return HenonMap(s=(self.s_e, self.s_psi, self.s_eps))

    @property
    def sigma_e(self) -> float:
        return henon_sigma(self.s_e)

    @property
    def sigma_psi(self) -> float:
        return henon_sigma(self.s_psi)

    @property
    def sigma_eps(self) -> float:
        return henon_sigma(self.s_eps)


@dataclass(frozen=True)
class SchemeConfig:
    """Lattice parameters, gas, transport and relaxation rates of one run."""
    dx: float
    lam: float
    gas: GasModel
    transport: TransportModel
    rates: RelaxationRates
    source: str = "plain"

    def __post_init__(self):
        if not self.dx > 0 or not self.lam > 0:
            raise InvalidParameterError(f"dx={self.dx} and lambda={self.lam} must be positive")
        if self.source not in SOURCE_VARIANTS:
            raise InvalidParameterError(f"source variant '{self.source}' not in {SOURCE_VARIANTS}")

    @property
    def dt(self) -> float:
        return self.dx / self.lam


def resolve_relaxation(
    nu: Optional[float],
    Pr: float,
    gamma: float,
    dx: float,
    lam: Optional[float] = None,
    s_e: Optional[float] = None,
    s_eps: float = 1.5,
    sigma_eps: Optional[float] = None,
) -> Tuple[float, float, RelaxationRates]:
    """
    Relaxation rates of the coupled scheme.

    sigma_e follows nu = sigma_e lam dx, sigma_psi = (3/2)(gamma/Pr) sigma_e,
    and s_eps defaults to 1.5 unless sigma_eps is given. When s_e is fixed
    and lam is left open, lam is solved from nu. Returns (lam, nu, rates).
    """
    if not dx > 0:
        raise InvalidParameterError(f"dx={dx} must be positive")

    if s_e is None:
        if nu is None:
            raise InvalidParameterError("either nu or s_e must be given")
        lam = 1.0 if lam is None else lam
        sigma_e = nu / (lam * dx)
        s_e = sigma_to_s(sigma_e)
    else:
        sigma_e = henon_sigma(s_e)
        if lam is None:
            lam = 1.0 if nu is None else nu / (sigma_e * dx)
        implied_nu = sigma_e * lam * dx
        if nu is not None and abs(implied_nu - nu) > NU_CONSISTENCY_RTOL * abs(nu):
            raise InvalidParameterError(
                f"nu={nu:.6g} conflicts with s_e={s_e} (sigma_e lambda dx = {implied_nu:.6g})"
            )
        nu = implied_nu if nu is None else nu

    sigma_psi = 1.5 * gamma / Pr * sigma_e
    if sigma_eps is not None:
        s_eps = sigma_to_s(sigma_eps)

    rates = RelaxationRates(s_e=s_e, s_psi=sigma_to_s(sigma_psi), s_eps=s_eps)
    logger.debug(
        f"LATTICE | Relaxation resolved | lambda: {lam:.6g} | nu: {nu:.6g} | "
        f"s_e: {rates.s_e:.6g} | s_psi: {rates.s_psi:.6g} | s_eps: {rates.s_eps:.6g}"
    )
    return lam, nu, rates
