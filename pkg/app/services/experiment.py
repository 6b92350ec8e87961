import copy
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from app.analysis.convergence import ConvergenceReport, NORMS, convergence_order, grid_error, restrict
from app.analysis.linear import (
    EquilibriumDiscrepancy,
    StabilityReport,
    TransportPrediction,
    amplification_scan,
    equilibrium_discrepancy,
    predicted_transport,
)
from app.config import config
from app.core.errors import ConfigError, IncompatibleRunsError, InvalidParameterError, LBMError, SolverError
from app.reference.fd import check_cfl, fd_advance, fd_finished, fd_run, fd_state_from_fields
from app.schemes.advdiff import advdiff_field_at_equilibrium, advdiff_step
from app.schemes.fluid import fluid_field_at_equilibrium, fluid_step
from app.schemes.initial import MacroFields, acoustic_wave, gaussian, grid, sine_mode
from app.schemes.ns_entropy import ns_state_at_equilibrium, ns_step
from app.services.output import (
    SNAPSHOT_COLUMNS,
    DiagnosticsRecord,
    RunOutputStore,
    grid_totals,
    read_snapshot,
    resolve_snapshot,
    snapshot_frame,
)
from app.services.run_config import RunConfig, apply_overrides, parse_config
from app.utils.logger import log_startup, logger
from app.utils.timing import Stopwatch, timed

# Relative tolerance when matching final times of two runs.
TIME_RTOL = 1e-8


class Simulation(NamedTuple):
    """Scheme adapter driven by the generic step loop."""
    area: str
    state: Any
    advance: Callable[[Any], Any]
    fields: Callable[[Any], Tuple[np.ndarray, np.ndarray, np.ndarray]]
    finished: Callable[[Any], bool]


@dataclass
class RunResult:
    name: str
    t: float
    steps: int
    final: Dict[str, np.ndarray]
    summary: Dict[str, Any]
    run_dir: Optional[Path] = None
    snapshots: List[Path] = field(default_factory=list)
    diagnostics: Optional[Path] = None
    children: List["RunResult"] = field(default_factory=list)


def initial_fields(cfg: RunConfig) -> MacroFields:
    """Macroscopic initial fields (rho, J, zeta) of a run."""
    init, gas, n, length = cfg.initial, cfg.gas, cfg.n, config.DOMAIN_LENGTH
    x = grid(n, length)

    if cfg.scheme == "advdiff-d1q3":
        if init["preset"] == "gaussian":
            zeta = gaussian(n, init["amplitude"], init["width"], init["center"], length)
        else:
            zeta = sine_mode(n, init["mode"], init["amplitude"], 1.0, length)
        rho = np.full(n, gas.rho0)
        return MacroFields(x=x, rho=rho, J=rho * cfg.advdiff.u0, zeta=zeta)

    if init["preset"] == "acoustic-wave":
        return acoustic_wave(n, gas, init["amplitude"], length)
    if init["preset"] == "gaussian":
        rho = gas.rho0 * (1.0 + gaussian(n, init["amplitude"], init["width"], init["center"], length))
    else:
        rho = gas.rho0 * sine_mode(n, init["mode"], init["amplitude"], 1.0, length)
    return MacroFields(x=x, rho=rho, J=np.zeros(n), zeta=rho * gas.s0)


class ExperimentRunner:
    """
    Orchestrates runs of every scheme through one step loop.

    Each scheme is wrapped in a ``Simulation`` adapter (initial state,
    advance, conserved fields, stop test); ``_march`` handles snapshots,
    per-step diagnostics, error wrapping and the run summary.

    Usage:
        result = experiment_runner.run_experiment(load_preset("fig1"))
        table = experiment_runner.compare_runs("runs/fig2", "runs/fd640")
        report = experiment_runner.run_convergence("fig2", [40, 80, 160], "fd:640")
    """

    def _build(self, cfg: RunConfig) -> Simulation:
        macro = initial_fields(cfg)
        scheme = cfg.scheme_config

        if cfg.scheme == "ns-d1q3q3":
            state = ns_state_at_equilibrium(macro.rho, macro.J, macro.zeta, scheme)
            return Simulation(
                area="NS",
                state=state,
                advance=lambda s: ns_step(s, scheme),
                fields=lambda s: (s.rho, s.J, s.zeta),
                finished=lambda s: s.step >= cfg.steps,
            )

        if cfg.scheme == "fluid-d1q3":
            state = fluid_field_at_equilibrium(macro.rho, macro.J, scheme)
            s0 = cfg.gas.s0

            def fluid_fields(f):
                m = f.moments()
                return m[0], m[1], m[0] * s0

            return Simulation(
                area="FLUID",
                state=state,
                advance=lambda f: fluid_step(f, scheme),
                fields=fluid_fields,
                finished=lambda f: f.step >= cfg.steps,
            )

        if cfg.scheme == "advdiff-d1q3":
            params = cfg.advdiff
            state = advdiff_field_at_equilibrium(macro.zeta, params, cfg.dx)
            return Simulation(
                area="ADVDIFF",
                state=state,
                advance=lambda f: advdiff_step(f, params),
                fields=lambda f: (macro.rho, macro.J, f.zeta),
                finished=lambda f: f.step >= cfg.steps,
            )

        if cfg.scheme == "reference-fd":
            t_final, cfl, lam = cfg.t_final, check_cfl(cfg.fd_cfl), cfg.fd_lam
            return Simulation(
                area="FD",
                state=fd_state_from_fields(macro.rho, macro.J, macro.zeta, cfg.dx),
                advance=lambda s: fd_advance(s, cfg.gas, cfg.transport, t_final, cfl, lam),
                fields=lambda s: (s.rho, s.J, s.zeta),
                finished=lambda s: fd_finished(s, t_final),
            )

        raise InvalidParameterError(f"scheme '{cfg.scheme}' has no time-marching solver")

    def _march(self, cfg: RunConfig, store: Optional[RunOutputStore] = None) -> RunResult:
        """Generic step loop: advance, record diagnostics every step, snapshot at cadence."""
        sim = self._build(cfg)
        state = sim.state
        x = grid(cfg.n, config.DOMAIN_LENGTH)

        def record(s) -> DiagnosticsRecord:
            rho, J, zeta = sim.fields(s)
            return grid_totals(s.t, rho, J, zeta, cfg.gas, cfg.dx)

        def snapshot(s) -> None:
            if store is not None:
                rho, J, zeta = sim.fields(s)
                snapshots.append(store.write_snapshot(s.step, s.t, snapshot_frame(x, rho, J, zeta, cfg.gas)))

        snapshots: List[Path] = []
        if store is not None:
            store.reset()
        records = [record(state)]
        snapshot(state)
        last_written = state.step
        produced = 0.0

        logger.info(f"RUN | Started | {cfg.name} | Scheme: {cfg.scheme} | N: {cfg.n} | Source: {cfg.source}")
        with Stopwatch() as watch:
            while not sim.finished(state):
                attempted = state.step + 1
                try:
                    state = sim.advance(state)
                    records.append(record(state))
                except SolverError:
                    raise
                except LBMError as e:
                    logger.error(f"{sim.area} | Step failed | {cfg.name} | Step: {attempted} | {e}")
                    raise SolverError(f"{cfg.name}: {e}", step=attempted) from e

                production = getattr(state, "production", None)
                if production is not None:
                    produced += float(np.sum(production) * cfg.dx)
                if cfg.snapshot_every and state.step % cfg.snapshot_every == 0:
                    snapshot(state)
                    last_written = state.step
                    logger.debug(f"{sim.area} | Step {state.step} | t: {state.t:.6g}")

        if last_written != state.step:
            snapshot(state)

        rho, J, zeta = sim.fields(state)
        summary = self._summary(cfg, records, watch.elapsed, state.step)
        if cfg.scheme == "ns-d1q3q3":
            summary["entropy_produced"] = produced

        result = RunResult(
            name=cfg.name, t=float(state.t), steps=state.step, summary=summary,
            final={"x": x, "rho": np.array(rho), "J": np.array(J), "zeta": np.array(zeta)},
            snapshots=snapshots,
        )
        if store is not None:
            result.run_dir = store.run_dir
            result.diagnostics = store.write_diagnostics(records)
            store.write_index()
            store.write_summary(summary)

        drift = summary["drift"]
        logger.info(
            f"RUN | Complete | {cfg.name} | Steps: {state.step} | Wall: {watch.elapsed:.2f}s | "
            f"Mass drift: {drift['mass']:.3e} | Momentum drift: {drift['momentum']:.3e} | "
            f"Energy drift: {drift['energy']:.3e}"
        )
        return result

    def _summary(self, cfg: RunConfig, records: List[DiagnosticsRecord], wall: float,
                 steps: int) -> Dict[str, Any]:
        first, last = records[0], records[-1]
        length = config.DOMAIN_LENGTH
        scales = {
            "mass": abs(first.total_mass),
            "momentum": abs(first.total_mass) * cfg.gas.c0,
            "energy": abs(first.total_energy),
            "entropy": cfg.gas.rho0 * cfg.gas.cp * length,
        }
        drift = {
            name: (getattr(last, f"total_{name}") - getattr(first, f"total_{name}")) / scale
            for name, scale in scales.items()
        }
        return {
            "name": cfg.name,
            "scheme": cfg.scheme,
            "n": cfg.n,
            "dx": cfg.dx,
            "dt": cfg.dt,
            "lam": cfg.lam,
            "source": cfg.source,
            "steps": steps,
            "t_final": last.t,
            "wall_time_s": wall,
            "initial": first._asdict(),
            "final": last._asdict(),
            "drift": drift,
        }

    def simulate(self, cfg: RunConfig) -> RunResult:
        """Run in memory without writing any file."""
        return self._march(cfg)

    def stability(self, cfg: RunConfig) -> Tuple[StabilityReport, EquilibriumDiscrepancy]:
        """
        Amplification scan around the configured reference state. The linear
        equilibria are the printed forms unless ``stability.equilibria`` asks
        for the Jacobian of the nonlinear ones; both are kept in the report.
        """
        discrepancy = equilibrium_discrepancy(cfg.reference, cfg.gas, cfg.lam)
        choice = cfg.document["stability"]["equilibria"]
        lin = discrepancy.jacobian if choice == "jacobian" else discrepancy.printed
        report = amplification_scan(cfg.scheme_config, lin, k_samples=cfg.document["stability"]["k_samples"])
        return report, discrepancy

    def transport_prediction(self, cfg: RunConfig) -> TransportPrediction:
        return predicted_transport(cfg.scheme_config, cfg.reference)

    @timed("RUN")
    def run_experiment(self, cfg: RunConfig) -> RunResult:
        """Execute a resolved run and write snapshots, diagnostics and summary under its output directory."""
        log_startup(cfg)
        if cfg.scheme == "lin-stability":
            return self._run_stability(cfg)
        if cfg.document["run"]["dual_source"]:
            return self._run_dual(cfg)
        return self._march(cfg, RunOutputStore(cfg.output_dir))

    def _run_stability(self, cfg: RunConfig) -> RunResult:
        store = RunOutputStore(cfg.output_dir)
        store.reset()
        with Stopwatch() as watch:
            report, discrepancy = self.stability(cfg)
        csv_path = report.to_csv(cfg.output_dir / "stability.csv")
        summary = {
            "name": cfg.name,
            "scheme": cfg.scheme,
            "reference": asdict(cfg.reference),
            "k_samples": int(report.k_dx.size),
            "max_radius": report.max_radius,
            "verdict": report.verdict,
            "equilibria": cfg.document["stability"]["equilibria"],
            "wall_time_s": watch.elapsed,
            "predicted_transport": self.transport_prediction(cfg)._asdict(),
            "equilibrium_max_gap": discrepancy.max_gap,
            "printed_equilibria": discrepancy.printed.matrix().tolist(),
            "jacobian_equilibria": discrepancy.jacobian.matrix().tolist(),
        }
        store.write_summary(summary)
        return RunResult(name=cfg.name, t=0.0, steps=0, final={}, summary=summary,
                         run_dir=cfg.output_dir, snapshots=[csv_path])

    def _run_dual(self, cfg: RunConfig) -> RunResult:
        """Same run with the entropy source on and off, in two subdirectories."""
        children = [
            self._march(child, RunOutputStore(child.output_dir))
            for child in (
                cfg.with_source(variant, cfg.output_dir / f"source-{variant}")
                for variant in (cfg.source if cfg.source != "none" else "plain", "none")
            )
        ]
        on, off = children
        summary = {
            "name": cfg.name,
            "scheme": cfg.scheme,
            "dual_source": True,
            "runs": {child.summary["source"]: child.summary for child in children},
            "energy_drift": {child.summary["source"]: child.summary["drift"]["energy"] for child in children},
            "source_reduces_energy_drift": abs(on.summary["drift"]["energy"]) < abs(off.summary["drift"]["energy"]),
        }
        cfg.output_dir.mkdir(parents=True, exist_ok=True)
        RunOutputStore(cfg.output_dir).write_summary(summary)
        return RunResult(name=cfg.name, t=on.t, steps=on.steps, final=on.final, summary=summary,
                         run_dir=cfg.output_dir, children=children)

    def compare_runs(self, file_a: Path, file_b: Path, norm: str = "l2",
                     restriction: str = "average") -> pd.DataFrame:
        """
        Per-field L2 and Linf differences of two snapshots (or the last
        snapshots of two run directories). Integer-ratio grids are brought
        onto the coarser one.
        """
        if norm not in NORMS:
            raise InvalidParameterError(f"norm '{norm}' not in {NORMS}")
        path_a, t_a = resolve_snapshot(file_a)
        path_b, t_b = resolve_snapshot(file_b)
        if t_a is not None and t_b is not None:
            if abs(t_a - t_b) > TIME_RTOL * max(1.0, abs(t_a), abs(t_b)):
                raise IncompatibleRunsError(f"snapshot times differ: t={t_a:.12g} vs t={t_b:.12g}")
        else:
            logger.warning(f"RUN | Compare | Snapshot time unknown, times not checked | {path_a} | {path_b}")

        frame_a, frame_b = read_snapshot(path_a), read_snapshot(path_b)
        if len(frame_a) < len(frame_b):
            frame_a, frame_b = frame_b, frame_a
        fine, coarse = frame_a, frame_b
        n_fine, n_coarse = len(fine), len(coarse)

        dx_fine = float(fine["x"].iloc[1] - fine["x"].iloc[0])
        dx_coarse = float(coarse["x"].iloc[1] - coarse["x"].iloc[0])
        if abs(dx_fine * n_fine - dx_coarse * n_coarse) > 1e-9 * dx_coarse * n_coarse:
            raise IncompatibleRunsError(
                f"domain lengths differ: {dx_fine * n_fine:.12g} vs {dx_coarse * n_coarse:.12g}"
            )

        rows = []
        for name in SNAPSHOT_COLUMNS[1:]:
            a = restrict(fine[name].to_numpy(), n_coarse, restriction)
            b = coarse[name].to_numpy()
            rows.append({
                "field": name,
                "l2": grid_error(a, b, dx_coarse, "l2"),
                "linf": grid_error(a, b, dx_coarse, "linf"),
            })
        table = pd.DataFrame(rows, columns=["field", "l2", "linf"])
        table["error"] = table[norm]
        logger.info(f"RUN | Compared | {path_a} vs {path_b} | Grids: {n_fine}/{n_coarse} | Norm: {norm}")
        return table

    def run_convergence(
        self,
        preset: str,
        meshes: Sequence[int] = (),
        reference: str = "fd:640",
        overrides: Sequence[str] = (),
        fields: Sequence[str] = ("rho", "J", "zeta"),
        restriction: str = "inject",
    ) -> ConvergenceReport:
        """
        Empirical orders of a preset over ``meshes`` against a reference
        run given as ``fd:N`` (finite differences) or ``lbm:N``.
        """
        meshes = list(meshes) or list(config.DEFAULT_MESHES)
        kind, _, size = reference.partition(":")
        if kind not in ("fd", "lbm") or not size.isdigit():
            raise ConfigError(f"reference '{reference}' is not of the form fd:N or lbm:N", key="reference")

        document = apply_overrides({"preset": preset}, overrides)
        base = parse_config(document)
        if base.scheme not in ("ns-d1q3q3", "fluid-d1q3", "advdiff-d1q3"):
            raise ConfigError(f"scheme '{base.scheme}' cannot be refined", key="run.scheme")
        if kind == "fd" and base.scheme == "advdiff-d1q3":
            raise ConfigError("the finite-difference reference solves the fluid equations only", key="reference")
        t_target = base.with_mesh(meshes[0]).t_final

        ref_doc = copy.deepcopy(base.document)
        ref_doc["lattice"].update(n=int(size), dx=None)
        if kind == "fd":
            ref_t, ref_final = self._fd_reference(parse_config(ref_doc), t_target,
                                                  isentropic=base.scheme == "fluid-d1q3")
        else:
            ref = self.simulate(parse_config(ref_doc))
            ref_t, ref_final = ref.t, ref.final
        logger.info(f"CONVERGENCE | Reference ready | {reference} | t: {ref_t:.6g}")

        def run_factory(n: int) -> Dict[str, np.ndarray]:
            result = self.simulate(base.with_mesh(n))
            if abs(result.t - ref_t) > TIME_RTOL * max(1.0, abs(ref_t)):
                raise IncompatibleRunsError(f"mesh {n} ends at t={result.t:.12g}, reference at t={ref_t:.12g}")
            return result.final

        return convergence_order(run_factory, meshes, ref_final, fields=fields, restriction=restriction,
                                 length=config.DOMAIN_LENGTH)

    def _fd_reference(self, cfg: RunConfig, t_final: float,
                      isentropic: bool = False) -> Tuple[float, Dict[str, np.ndarray]]:
        """Final fields of a finite-difference run; an isentropic reference drops heat conduction."""
        transport = replace(cfg.transport, Pr=np.inf) if isentropic else cfg.transport
        macro = initial_fields(cfg)
        initial = fd_state_from_fields(macro.rho, macro.J, macro.zeta, cfg.dx)
        final = fd_run(initial, cfg.gas, transport, t_final, cfg.fd_cfl, lam=cfg.fd_lam)[-1]
        return final.t, {"x": macro.x, "rho": final.rho, "J": final.J, "zeta": final.zeta}


experiment_runner = ExperimentRunner()
