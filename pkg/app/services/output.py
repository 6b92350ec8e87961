import json
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Optional, Tuple

import numpy as np
import pandas as pd

from app.config import config
from app.core.errors import IncompatibleRunsError
from app.core.gas import GasModel, eos
from app.utils.logger import logger

SNAPSHOT_COLUMNS = ["x", "rho", "u", "p", "T", "s", "zeta"]
DIAGNOSTIC_COLUMNS = ["t", "total_mass", "total_momentum", "total_energy", "total_entropy"]
INDEX_COLUMNS = ["step", "t", "file"]


class DiagnosticsRecord(NamedTuple):
    t: float
    total_mass: float
    total_momentum: float
    total_energy: float
    total_entropy: float


def snapshot_frame(x: np.ndarray, rho: np.ndarray, J: np.ndarray, zeta: np.ndarray,
                   gas: GasModel) -> pd.DataFrame:
    """Per-cell snapshot record with thermodynamics from the equation of state."""
    thermo = eos(rho, zeta, gas)
    return pd.DataFrame({
        "x": x,
        "rho": rho,
        "u": J / rho,
        "p": thermo.p,
        "T": thermo.T,
        "s": thermo.s,
        "zeta": zeta,
    }, columns=SNAPSHOT_COLUMNS)


def grid_totals(t: float, rho: np.ndarray, J: np.ndarray, zeta: np.ndarray, gas: GasModel,
                dx: float) -> DiagnosticsRecord:
    thermo = eos(rho, zeta, gas)
    energy = rho * (thermo.i + 0.5 * (J / rho) ** 2)
    return DiagnosticsRecord(
        t=float(t),
        total_mass=float(np.sum(rho) * dx),
        total_momentum=float(np.sum(J) * dx),
        total_energy=float(np.sum(energy) * dx),
        total_entropy=float(np.sum(zeta) * dx),
    )


class RunOutputStore:
    """
    CSV store for one run directory.

    Layout:
        <run>/snap_<step:06d>.csv   x, rho, u, p, T, s, zeta
        <run>/diag.csv              t, total_mass, total_momentum, total_energy, total_entropy
        <run>/index.csv             step, t, file
        <run>/summary.json

    Numbers are written with ``config.CSV_SIGNIFICANT_DIGITS`` significant digits.
    """
    def __init__(self, run_dir: Path):
        self.run_dir = Path(run_dir)
        self.index: List[Tuple[int, float, str]] = []

    @property
    def float_format(self) -> str:
        return f"%.{config.CSV_SIGNIFICANT_DIGITS}g"

    @property
    def diagnostics_path(self) -> Path:
        return self.run_dir / "diag.csv"

    @property
    def index_path(self) -> Path:
        return self.run_dir / "index.csv"

    @property
    def summary_path(self) -> Path:
        return self.run_dir / "summary.json"

    def snapshot_path(self, step: int) -> Path:
        return self.run_dir / f"snap_{step:06d}.csv"

    def reset(self) -> int:
        """Create the run directory and remove files of a previous run. Returns the count removed."""
        self.run_dir.mkdir(parents=True, exist_ok=True)
        removed = 0
        stale = list(self.run_dir.glob("snap_*.csv")) + [self.diagnostics_path, self.index_path, self.summary_path]
        for path in stale:
            if path.exists():
                path.unlink()
                removed += 1
        self.index = []
        if removed:
            logger.info(f"OUTPUT | Cleared {removed} files from previous run | {self.run_dir}")
        return removed

    def write_snapshot(self, step: int, t: float, frame: pd.DataFrame) -> Path:
        path = self.snapshot_path(step)
        frame.to_csv(path, index=False, float_format=self.float_format)
        self.index.append((step, float(t), path.name))
        logger.debug(f"OUTPUT | Snapshot written | {path.name} | t: {t:.6g}")
        return path

    def write_diagnostics(self, records: List[DiagnosticsRecord]) -> Path:
        frame = pd.DataFrame(records, columns=DIAGNOSTIC_COLUMNS)
        frame.to_csv(self.diagnostics_path, index=False, float_format=self.float_format)
        return self.diagnostics_path

    def write_index(self) -> Path:
        frame = pd.DataFrame(self.index, columns=INDEX_COLUMNS)
        frame.to_csv(self.index_path, index=False, float_format=self.float_format)
        return self.index_path

    def write_summary(self, summary: Dict[str, Any]) -> Path:
        with open(self.summary_path, "w") as f:
            json.dump(summary, f, indent=2)
        logger.info(f"OUTPUT | Summary written | {self.summary_path}")
        return self.summary_path


def read_snapshot(path: Path) -> pd.DataFrame:
    frame = pd.read_csv(path)
    if list(frame.columns) != SNAPSHOT_COLUMNS:
        raise IncompatibleRunsError(f"{path} is not a snapshot file (columns {list(frame.columns)})")
    return frame


def read_diagnostics(path: Path) -> pd.DataFrame:
    frame = pd.read_csv(path)
    if list(frame.columns) != DIAGNOSTIC_COLUMNS:
        raise IncompatibleRunsError(f"{path} is not a diagnostics file (columns {list(frame.columns)})")
    return frame


def resolve_snapshot(path: Path) -> Tuple[Path, Optional[float]]:
    """
    Snapshot file and its time. A run directory resolves to its last
    snapshot; the time comes from the directory's index.
    """
    path = Path(path)
    run_dir = path if path.is_dir() else path.parent
    index_path = run_dir / "index.csv"
    index = pd.read_csv(index_path) if index_path.exists() else None

    if path.is_dir():
        if index is None or index.empty:
            raise IncompatibleRunsError(f"run directory {path} has no snapshot index")
        last = index.iloc[-1]
        return run_dir / str(last["file"]), float(last["t"])

    if not path.exists():
        raise IncompatibleRunsError(f"snapshot not found: {path}")
    if index is not None:
        match = index[index["file"] == path.name]
        if not match.empty:
            return path, float(match.iloc[-1]["t"])
    return path, None
