"""
Batch job running every figure preset on the three meshes plus the
finite-difference reference, and the linear stability presets.
Run: python scripts/reproduce_figures.py [--meshes 40,80,160] [--reference 640]
"""
import sys
from pathlib import Path

# Add app to path
sys.path.insert(0, str(Path(__file__).parent.parent))

import typer
from dotenv import load_dotenv

load_dotenv()

from app.config import config
from app.core.errors import LBMError
from app.services.experiment import experiment_runner
from app.services.run_config import apply_overrides, parse_config
from app.utils.logger import logger

FIGURES = ("fig1", "fig2", "fig3", "fig4")


def reproduce_figure(preset: str, meshes, reference: int) -> bool:
    """Run one preset on every mesh and the reference solver. Returns False on failure."""
    ok = True
    for n in meshes:
        name = f"{preset}-n{n}"
        try:
            cfg = parse_config(apply_overrides({"preset": preset}, [f"lattice.n={n}", f"run.name={name}"]))
            experiment_runner.run_experiment(cfg)
            logger.info(f"REPRODUCE | {name} | Done")
        except LBMError as e:
            logger.error(f"REPRODUCE | {name} | Failed: {e}")
            ok = False

    name = f"{preset}-fd{reference}"
    try:
        cfg = parse_config(apply_overrides({"preset": preset}, [
            f"lattice.n={reference}", "run.scheme=reference-fd", f"run.name={name}", "run.dual_source=false",
        ]))
        experiment_runner.run_experiment(cfg)
        logger.info(f"REPRODUCE | {name} | Done")
    except LBMError as e:
        logger.error(f"REPRODUCE | {name} | Failed: {e}")
        ok = False
    return ok


def main(
    meshes: str = typer.Option(",".join(str(n) for n in config.DEFAULT_MESHES), help="Comma-separated cell counts"),
    reference: int = typer.Option(640, help="Cells of the finite-difference reference run"),
) -> None:
    """Reproduce every figure run and the stability scans under OUTPUT_DIR."""
    meshes = [int(m) for m in meshes.split(",")]

    logger.info("=" * 60)
    logger.info(f"REPRODUCE | Starting | Presets: {', '.join(FIGURES)} | Meshes: {meshes} | FD: {reference}")
    logger.info("=" * 60)

    results = {preset: reproduce_figure(preset, meshes, reference) for preset in FIGURES}

    scans = {
        "stab7": {},
        "stab7-shifted": {"u0_over_lambda": 0.15, "s0_over_cp": 0.2},
    }
    for name, reference_state in scans.items():
        try:
            result = experiment_runner.run_experiment(parse_config({
                "preset": "stab7",
                "run": {"scheme": "lin-stability", "name": name},
                "stability": reference_state,
            }))
        except LBMError as e:
            logger.error(f"REPRODUCE | {name} | Failed: {e}")
            results[name] = False
            continue
        verdict = result.summary["verdict"]
        if verdict != "stable":
            logger.error(f"REPRODUCE | {name} | Verdict: {verdict} | "
                         f"Max radius: {result.summary['max_radius']:.6f}")
        results[name] = verdict == "stable"

    failed = [name for name, ok in results.items() if not ok]
    logger.info(f"REPRODUCE | Complete | Output: {config.OUTPUT_DIR} | Failed: {failed or 'none'}")
    if failed:
        raise typer.Exit(code=1)


if __name__ == "__main__":
    typer.run(main)
