"""Grid-convergence measurement against a reference solution."""
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Sequence, Union

import numpy as np
import pandas as pd

from app.core.errors import IncompatibleRunsError, InvalidParameterError
from app.utils.logger import logger

Fields = Mapping[str, np.ndarray]
RunFactory = Callable[[int], Fields]

NORMS = ("l2", "linf")
RESTRICTIONS = ("inject", "average")


def restrict(fine: np.ndarray, n_coarse: int, method: str = "inject") -> np.ndarray:
    """
    Bring a periodic vertex field onto a coarser grid of integer ratio.

    ``inject`` keeps the shared vertices; ``average`` applies the centred
    full-weighting stencil of width 2r - 1.
    """
    n_fine = fine.size
    if n_coarse <= 0 or n_fine % n_coarse:
        raise IncompatibleRunsError(f"grids of {n_fine} and {n_coarse} cells do not have an integer ratio")
    ratio = n_fine // n_coarse
    if method == "inject":
        return fine[::ratio].copy()
    if method != "average":
        raise InvalidParameterError(f"restriction '{method}' not in {RESTRICTIONS}")

    smoothed = np.zeros_like(fine, dtype=float)
    for offset in range(-(ratio - 1), ratio):
        smoothed += (ratio - abs(offset)) / ratio**2 * np.roll(fine, -offset)
    return smoothed[::ratio]


def grid_error(a: np.ndarray, b: np.ndarray, dx: float, norm: str = "l2") -> float:
    if a.shape != b.shape:
        raise IncompatibleRunsError(f"field shapes differ: {a.shape} vs {b.shape}")
    diff = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    if norm == "l2":
        return float(np.sqrt(dx * np.sum(diff**2)))
    if norm == "linf":
        return float(np.max(np.abs(diff)))
    raise InvalidParameterError(f"norm '{norm}' not in {NORMS}")


@dataclass
class ConvergenceReport:
    meshes: List[int]
    errors: Dict[str, List[float]]
    pairwise: Dict[str, List[float]]
    orders: Dict[str, float]
    warning: bool = False
    messages: List[str] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        """One row per mesh; pairwise orders sit on the finer mesh of each pair."""
        frame = pd.DataFrame({"n": self.meshes, "dx": [1.0 / n for n in self.meshes]})
        for name, errs in self.errors.items():
            frame[f"error_{name}"] = errs
            frame[f"order_{name}"] = [np.nan] + self.pairwise[name]
        return frame


def _slope(meshes: Sequence[int], errs: Sequence[float]) -> float:
    errs = np.asarray(errs, dtype=float)
    if np.any(errs <= 0) or len(errs) < 2:
        return float("nan")
    h = 1.0 / np.asarray(meshes, dtype=float)
    return float(np.polyfit(np.log(h), np.log(errs), 1)[0])


def convergence_order(
    run_factory: RunFactory,
    meshes: Sequence[int],
    reference: Union[Fields, RunFactory],
    fields: Sequence[str] = ("rho", "J", "zeta"),
    norm: str = "l2",
    restriction: str = "inject",
    length: float = 1.0,
) -> ConvergenceReport:
    """
    Empirical convergence orders of ``run_factory`` over ``meshes``.

    ``reference`` is either a mapping of fine-grid fields restricted onto
    every mesh, or a callable giving the exact fields on a mesh. Pairwise
    orders are log2(e_i / e_{i+1}) scaled by the mesh ratio; the overall
    order is the least-squares slope of log e against log dx.
    """
    meshes = sorted(int(n) for n in meshes)
    if len(meshes) < 2:
        raise InvalidParameterError("convergence needs at least two meshes")

    errors: Dict[str, List[float]] = {name: [] for name in fields}
    for n in meshes:
        run = run_factory(n)
        ref = reference(n) if callable(reference) else {
            name: restrict(np.asarray(reference[name]), n, restriction) for name in fields
        }
        for name in fields:
            errors[name].append(grid_error(np.asarray(run[name]), np.asarray(ref[name]), length / n, norm))
        summary = " | ".join(f"{name}: {errors[name][-1]:.6g}" for name in fields)
        logger.debug(f"CONVERGENCE | Mesh done | N: {n} | {summary}")

    report = ConvergenceReport(meshes=meshes, errors=errors, pairwise={}, orders={})
    for name, errs in errors.items():
        pairs = []
        for (n1, e1), (n2, e2) in zip(zip(meshes, errs), zip(meshes[1:], errs[1:])):
            if e1 > 0 and e2 > 0:
                pairs.append(float(np.log(e1 / e2) / np.log(n2 / n1)))
            else:
                pairs.append(float("nan"))
        report.pairwise[name] = pairs
        report.orders[name] = _slope(meshes, errs)

        if any(e == 0 for e in errs):
            report.warning = True
            report.messages.append(f"{name}: zero error, order undefined")
        elif any(e2 >= e1 for e1, e2 in zip(errs, errs[1:])):
            report.warning = True
            report.messages.append(f"{name}: errors not monotone {['%.3g' % e for e in errs]}")

    for message in report.messages:
        logger.warning(f"CONVERGENCE | {message}")
    orders = " | ".join(f"{name}: {order:.3f}" for name, order in report.orders.items())
    logger.info(f"CONVERGENCE | Orders | Meshes: {meshes} | {orders}")
    return report
