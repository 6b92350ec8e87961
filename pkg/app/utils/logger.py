import logging
import sys
from logging.handlers import RotatingFileHandler
from app.config import config

def setup_logger() -> logging.Logger:
    """Configure and return the toolkit logger."""

    # Create logs directory
    config.LOG_DIR.mkdir(parents=True, exist_ok=True)

    # Create logger
    logger = logging.getLogger("")
    logger.setLevel(getattr(logging, config.LOG_LEVEL.upper(), logging.INFO))

    # Prevent duplicate handlers
    if logger.handlers:
        return logger

    # Format
    formatter = logging.Formatter(
        "%(asctime)s | %(levelname)-5s | %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S"
    )

    # Console handler
    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setLevel(logging.DEBUG)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    # File handler with rotation
    file_handler = RotatingFileHandler(
        config.LOG_DIR / "lbm.log",
        maxBytes=config.LOG_FILE_MAX_BYTES,
        backupCount=5,
    )
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(formatter)
    logger.addHandler(file_handler)

    return logger

logger = setup_logger()

def log_startup(run_config) -> None:
    """Log the resolved run configuration and its derived quantities."""
    logger.info("=" * 60)
    logger.info(f"STARTUP | D1Q3Q3 lattice Boltzmann toolkit | Scheme: {run_config.scheme}")
    logger.info(
        f"STARTUP | Mesh: N={run_config.n} | dx: {run_config.dx:.6g} | "
        f"lambda: {run_config.lam:.6g} | dt: {run_config.dt:.6g}"
    )

    derived = run_config.derived()
    summary = " | ".join(f"{k}: {v:.6g}" for k, v in derived.items() if isinstance(v, float))
    logger.info(f"STARTUP | Derived | {summary}")
    logger.info(f"STARTUP | Output directory: {config.OUTPUT_DIR}")
    logger.info("=" * 60)
