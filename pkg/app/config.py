import os
from pathlib import Path

class Config:
    # Output
    OUTPUT_DIR: Path = Path(os.getenv("OUTPUT_DIR", str(Path(__file__).parent.parent / "runs")))
    SNAPSHOT_EVERY: int = max(0, int(os.getenv("SNAPSHOT_EVERY", "0")))  # 0 = initial and final only
    CSV_SIGNIFICANT_DIGITS: int = max(1, min(17, int(os.getenv("CSV_SIGNIFICANT_DIGITS", "17"))))

    # Logging
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    LOG_DIR: Path = Path(os.getenv("LOG_DIR", str(Path(__file__).parent.parent / "logs")))
    LOG_FILE_MAX_BYTES: int = 1_000_000  # 1MB max log file size

    # Reference finite-difference solver - with validation
    FD_CFL: float = min(0.99, max(0.01, float(os.getenv("FD_CFL", "0.4"))))

    # Stability scan - with validation
    STABILITY_SAMPLES: int = max(8, int(os.getenv("STABILITY_SAMPLES", "512")))
    STABILITY_TOLERANCE: float = max(0.0, float(os.getenv("STABILITY_TOLERANCE", "1e-10")))

    # Physical defaults shared by every preset
    DOMAIN_LENGTH: float = 1.0
    DEFAULT_MESHES: list = [40, 80, 160]

    # Experiment presets. Values are run-document sections; anything not
    # listed falls back to the RunConfig defaults.
    PRESETS: dict = {
        "fig1": {
            "description": "Progressive linear wave, delta_rho = 0.001 rho0",
            "run": {"scheme": "ns-d1q3q3", "t_final": 3.0},
            "lattice": {"n": 40, "lam": 1.0},
            "gas": {"gamma": 1.4, "cp": 1.0, "c0_over_lambda": 0.5, "s0": 0.0},
            "transport": {"nu": 6.579e-4, "Pr": 1.0},
            "initial": {"preset": "acoustic-wave", "amplitude": 0.001},
        },
        "fig2": {
            "description": "Progressive nonlinear wave, delta_rho = 0.01 rho0",
            "run": {"scheme": "ns-d1q3q3", "t_final": 3.0},
            "lattice": {"n": 40, "lam": 1.0},
            "gas": {"gamma": 1.4, "cp": 1.0, "c0_over_lambda": 0.5, "s0": 0.0},
            "transport": {"nu": 6.579e-4, "Pr": 1.0},
            "initial": {"preset": "acoustic-wave", "amplitude": 0.01},
        },
        "fig3": {
            "description": "Strong nonlinear wave, delta_rho = 0.1 rho0",
            "run": {"scheme": "ns-d1q3q3", "t_final": 3.0},
            "lattice": {"n": 40, "lam": 1.0},
            "gas": {"gamma": 1.4, "cp": 1.0, "c0_over_lambda": 0.5, "s0": 0.0},
            "transport": {"nu": 6.579e-4, "Pr": 1.0},
            "initial": {"preset": "acoustic-wave", "amplitude": 0.1},
        },
        "fig4": {
            "description": "Strong nonlinear wave, entropy source on and off",
            "run": {"scheme": "ns-d1q3q3", "t_final": 3.0, "dual_source": True},
            "lattice": {"n": 40, "lam": 1.0},
            "gas": {"gamma": 1.4, "cp": 1.0, "c0_over_lambda": 0.5, "s0": 0.0},
            "transport": {"nu": 6.579e-4, "Pr": 1.0},
            "initial": {"preset": "acoustic-wave", "amplitude": 0.1},
        },
        "stab7": {
            "description": "Linear wave over 120 time steps, s_e = 1.9",
            "run": {"scheme": "ns-d1q3q3", "steps": 120},
            "lattice": {"n": 40, "lam": 1.0},
            "gas": {"gamma": 1.4, "cp": 1.0, "c0_over_lambda": 0.5, "s0": 0.0},
            "transport": {"nu": None, "Pr": 1.0, "s_e": 1.9},
            "initial": {"preset": "acoustic-wave", "amplitude": 0.001},
            "stability": {"u0_over_lambda": 0.0, "s0_over_cp": 0.0},
        },
        "fluid-wave": {
            "description": "Isentropic D1Q3 fluid scheme, linear acoustic wave",
            "run": {"scheme": "fluid-d1q3", "t_final": 3.0},
            "lattice": {"n": 40, "lam": 1.0},
            "gas": {"gamma": 1.4, "cp": 1.0, "c0_over_lambda": 0.5, "s0": 0.0},
            "transport": {"nu": 6.579e-4, "Pr": 1.0},
            "initial": {"preset": "acoustic-wave", "amplitude": 0.001},
        },
        "advdiff-gauss": {
            "description": "D1Q3 advection-diffusion of a periodic Gaussian",
            "run": {"scheme": "advdiff-d1q3", "t_final": 1.0},
            "lattice": {"n": 80, "lam": 1.0},
            "advdiff": {"u0": 0.0, "kappa": 1.0e-3, "alpha": 0.0},
            "initial": {"preset": "gaussian", "amplitude": 1.0, "width": 0.1},
        },
    }

config = Config()
