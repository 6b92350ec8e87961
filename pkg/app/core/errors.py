from typing import Optional


class LBMError(Exception):
    """Base class for every error raised by the toolkit."""


class InvalidParameterError(LBMError, ValueError):
    """A construction parameter is outside its admissible range."""


class StabilityDomainError(LBMError, ValueError):
    """A relaxation rate or Hénon coefficient is outside the stable domain."""


class PositivityError(LBMError, ValueError):
    """A density that must stay positive is not."""


class ClosureInfeasibleError(LBMError, ValueError):
    """The advection-diffusion closure has no admissible solution."""


class DimensionMismatchError(LBMError, ValueError):
    """Matrix and velocity set sizes disagree."""


class ThermodynamicStateError(LBMError, ValueError):
    """Density or temperature is non-positive somewhere on the grid."""

    def __init__(self, message: str, cell: Optional[int] = None, time: Optional[float] = None):
        self.reason = message
        self.cell = cell
        self.time = time
        details = []
        if cell is not None:
            details.append(f"cell {cell}")
        if time is not None:
            details.append(f"t={time:.6g}")
        super().__init__(f"{message} ({', '.join(details)})" if details else message)


class ConfigError(LBMError, ValueError):
    """A run document could not be parsed or violates a constraint."""

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        self.key = key
        self.line = line
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} [{', '.join(where)}]" if where else message)


class IncompatibleRunsError(LBMError, ValueError):
    """Two runs cannot be compared (grids or times disagree)."""


class SolverError(LBMError, RuntimeError):
    """A solver failed during the step loop."""

    def __init__(self, message: str, step: Optional[int] = None):
        self.step = step
        super().__init__(f"{message} (step {step})" if step is not None else message)
