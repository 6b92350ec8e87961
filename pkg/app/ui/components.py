"""Console rendering of run summaries, comparison tables and reports."""
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd
import typer

from app.analysis.convergence import ConvergenceReport
from app.analysis.linear import EquilibriumDiscrepancy, StabilityReport, TransportPrediction
from app.config import config

ROWS = ("e", "psi", "eps")


def render_rule(title: str) -> None:
    typer.echo(title)
    typer.echo("=" * 50)


def render_presets() -> None:
    """List every preset with its scheme and description."""
    render_rule("Presets")
    for name, preset in config.PRESETS.items():
        scheme = preset.get("run", {}).get("scheme", "ns-d1q3q3")
        typer.echo(f"  {name:<14} {scheme:<14} {preset.get('description', '')}")


def render_run_summary(summary: Dict[str, Any]) -> None:
    if summary.get("dual_source"):
        render_rule(f"Run {summary['name']} (source on/off)")
        for variant, drift in summary["energy_drift"].items():
            typer.echo(f"  source={variant:<6} energy drift: {drift:+.6e}")
        reduced = "yes" if summary["source_reduces_energy_drift"] else "no"
        typer.echo(f"  Source term reduces the energy drift: {reduced}")
        return

    if summary.get("scheme") == "lin-stability":
        typer.echo(f"Stability: max spectral radius {summary['max_radius']:.15f} ({summary['verdict']}, "
                   f"{summary['equilibria']} equilibria)")
        return

    render_rule(f"Run {summary['name']} [{summary['scheme']}]")
    typer.echo(f"  N={summary['n']}  dx={summary['dx']:.6g}  dt={summary['dt']:.6g}  steps={summary['steps']}")
    typer.echo(f"  t_final={summary['t_final']:.6g}  wall time={summary['wall_time_s']:.2f}s")
    for name, drift in summary["drift"].items():
        typer.echo(f"  {name:<9} drift: {drift:+.3e}")
    if "entropy_produced" in summary:
        typer.echo(f"  entropy produced: {summary['entropy_produced']:.6e}")


def render_stability(report: StabilityReport, discrepancy: EquilibriumDiscrepancy,
                     equilibria: str = "printed", prediction: Optional[TransportPrediction] = None) -> None:
    render_rule("Linear stability")
    typer.echo(f"  equilibria: {equilibria}")
    typer.echo(f"  k samples: {report.k_dx.size}")
    typer.echo(f"  max spectral radius: {report.max_radius:.15f}")
    typer.echo(f"  verdict: {report.verdict} (tolerance 1 + {report.tolerance:g})")
    if prediction is not None:
        typer.echo(f"  predicted nu: {prediction.nu:.6e} (effective {prediction.nu_effective:.6e})")
        typer.echo(f"  predicted zeta diffusivity: {prediction.zeta_diffusivity:.6e}")
    if not discrepancy.consistent:
        typer.echo(f"  printed linear equilibria differ from the Jacobian (max gap {discrepancy.max_gap:.3g})")
        for label, lin in (("printed", discrepancy.printed), ("jacobian", discrepancy.jacobian)):
            typer.echo(f"  {label}:")
            for row, values in zip(ROWS, lin.matrix()):
                typer.echo(f"    {row:<4} " + "  ".join(f"{v:+.6f}" for v in values))


def render_table(table: pd.DataFrame) -> None:
    typer.echo(table.to_string(index=False, float_format=lambda v: f"{v:.6e}"))


def render_convergence(report: ConvergenceReport) -> None:
    render_rule("Convergence")
    frame = report.to_frame()
    typer.echo(frame.to_string(index=False, float_format=lambda v: "" if np.isnan(v) else f"{v:.4e}"))
    typer.echo("")
    for name, order in report.orders.items():
        typer.echo(f"  order({name}) = {order:.3f}")
    if report.warning:
        for message in report.messages:
            typer.echo(f"  warning: {message}", err=True)
