import sys
from pathlib import Path
from typing import Annotated, List, Optional

import typer
from dotenv import load_dotenv

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

# Load environment variables
load_dotenv()

from app.core.errors import ConfigError, LBMError
from app.services.experiment import experiment_runner
from app.services.run_config import apply_overrides, parse_config
from app.ui.components import (
    render_convergence,
    render_presets,
    render_run_summary,
    render_stability,
    render_table,
)
from app.utils.logger import logger

app = typer.Typer(
    name="lbm1d",
    help="One-dimensional lattice Boltzmann schemes for fluids, advection-diffusion and entropy",
    add_completion=False,
)


def _fail(error: LBMError) -> None:
    logger.error(f"RUN | {type(error).__name__} | {error}")
    typer.echo(f"error: {error}", err=True)
    raise typer.Exit(code=1)


def _document(preset: Optional[str], config_file: Optional[Path], overrides: List[str]) -> dict:
    if preset and config_file:
        raise ConfigError("give either --preset or --config, not both")
    if config_file is not None:
        return apply_overrides(config_file, overrides)
    return apply_overrides({"preset": preset} if preset else {}, overrides)


@app.command()
def run(
    preset: Annotated[Optional[str], typer.Option("--preset", "-p", help="Preset name (see `presets`)")] = None,
    config_file: Annotated[Optional[Path], typer.Option("--config", "-c", help="YAML run document")] = None,
    mesh: Annotated[Optional[int], typer.Option("--mesh", "-n", help="Number of cells (overrides lattice.n)")] = None,
    out: Annotated[Optional[Path], typer.Option("--out", "-o", help="Run output directory")] = None,
    overrides: Annotated[Optional[List[str]], typer.Option("--set", help="Override section.key=value")] = None,
    echo: Annotated[bool, typer.Option("--echo", help="Print the resolved document and exit")] = False,
):
    """Run one experiment and write snapshots, diagnostics and summary."""
    extra = list(overrides or [])
    if mesh is not None:
        extra += [f"lattice.n={mesh}", "lattice.dx=null"]
    if out is not None:
        extra.append(f"output.dir={out}")
    try:
        cfg = parse_config(_document(preset, config_file, extra))
        if echo:
            typer.echo(cfg.echo_yaml())
            return
        result = experiment_runner.run_experiment(cfg)
    except LBMError as e:
        _fail(e)
    render_run_summary(result.summary)
    typer.echo(f"Output: {result.run_dir}")


@app.command()
def stability(
    preset: Annotated[Optional[str], typer.Option("--preset", "-p", help="Preset name")] = "stab7",
    config_file: Annotated[Optional[Path], typer.Option("--config", "-c", help="YAML run document")] = None,
    overrides: Annotated[Optional[List[str]], typer.Option("--set", help="Override section.key=value")] = None,
    out: Annotated[Optional[Path], typer.Option("--out", "-o", help="Write the scan as CSV")] = None,
):
    """Von Neumann scan of the linearized D1Q3Q3 scheme."""
    try:
        cfg = parse_config(_document(None if config_file else preset, config_file, list(overrides or [])))
        report, discrepancy = experiment_runner.stability(cfg)
        prediction = experiment_runner.transport_prediction(cfg)
        if out is not None:
            report.to_csv(out)
    except LBMError as e:
        _fail(e)
    render_stability(report, discrepancy, cfg.document["stability"]["equilibria"], prediction)
    if not report.stable:
        raise typer.Exit(code=2)


@app.command()
def compare(
    file_a: Annotated[Path, typer.Argument(help="Snapshot CSV or run directory")],
    file_b: Annotated[Path, typer.Argument(help="Snapshot CSV or run directory")],
    norm: Annotated[str, typer.Option("--norm", help="l2 or linf")] = "l2",
    restriction: Annotated[str, typer.Option("--restriction", help="average or inject")] = "average",
):
    """Per-field differences between two runs at matching times."""
    try:
        table = experiment_runner.compare_runs(file_a, file_b, norm=norm, restriction=restriction)
    except LBMError as e:
        _fail(e)
    render_table(table)


@app.command()
def convergence(
    preset: Annotated[str, typer.Option("--preset", "-p", help="Preset name")] = "fig2",
    meshes: Annotated[str, typer.Option("--meshes", help="Comma-separated cell counts")] = "40,80,160",
    reference: Annotated[str, typer.Option("--reference", help="fd:N or lbm:N")] = "fd:640",
    overrides: Annotated[Optional[List[str]], typer.Option("--set", help="Override section.key=value")] = None,
    out: Annotated[Optional[Path], typer.Option("--out", "-o", help="Write the table as CSV")] = None,
):
    """Empirical convergence orders against a fine reference run."""
    try:
        try:
            mesh_list = [int(m) for m in meshes.split(",") if m.strip()]
        except ValueError as e:
            raise ConfigError(f"cannot read meshes '{meshes}'", key="meshes") from e
        report = experiment_runner.run_convergence(preset, mesh_list, reference, list(overrides or []))
        if out is not None:
            out.parent.mkdir(parents=True, exist_ok=True)
            report.to_frame().to_csv(out, index=False)
    except LBMError as e:
        _fail(e)
    render_convergence(report)


@app.command()
def presets():
    """List the available presets."""
    render_presets()


def main():
    """Main entry point for the CLI."""
    app()


if __name__ == "__main__":
    main()
