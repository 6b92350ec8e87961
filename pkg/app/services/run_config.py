"""
Run documents: parsing, preset expansion, dotted overrides and resolution
of every derived lattice quantity.

A document is a mapping of sections whose values are scalars:

    preset: fig2            # optional, expanded first
    run:       {scheme, name, t_final, steps, cfl, dual_source}
    lattice:   {n, dx, lam}
    gas:       {gamma, cp, rho0, c0_over_lambda, s0}
    transport: {nu, Pr, s_e, s_eps, sigma_eps, closure}
    source:    {enabled, variant}
    initial:   {preset, amplitude, width, center, mode}
    output:    {dir, snapshot_every}
    advdiff:   {u0, kappa, alpha, s_psi}
    stability: {u0_over_lambda, s0_over_cp, k_samples, equilibria}

``derived`` is written by ``RunConfig.echo`` and ignored on load.
"""
import copy
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Optional, Union

import yaml

from app.analysis.linear import ReferenceState
from app.config import config
from app.core.errors import ConfigError, LBMError
from app.core.gas import GasModel, TransportModel
from app.reference.fd import CLOSURES
from app.schemes.advdiff import AdvDiffParams, resolve_advdiff_params
from app.schemes.base import RelaxationRates, SchemeConfig, SOURCE_VARIANTS, resolve_relaxation
from app.utils.logger import logger

EQUILIBRIA = ("printed", "jacobian")
SCHEMES = ("fluid-d1q3", "advdiff-d1q3", "ns-d1q3q3", "reference-fd", "lin-stability")
INITIAL_PRESETS = ("acoustic-wave", "gaussian", "sine-mode")

# section -> key -> (type, default)
SCHEMA: Dict[str, Dict[str, tuple]] = {
    "run": {
        "scheme": (str, "ns-d1q3q3"),
        "name": (str, None),
        "t_final": (float, 3.0),
        "steps": (int, None),
        "cfl": (float, None),
        "dual_source": (bool, False),
    },
    "lattice": {
        "n": (int, 40),
        "dx": (float, None),
        "lam": (float, None),
    },
    "gas": {
        "gamma": (float, 1.4),
        "cp": (float, 1.0),
        "rho0": (float, 1.0),
        "c0_over_lambda": (float, 0.5),
        "s0": (float, 0.0),
    },
    "transport": {
        "nu": (float, 6.579e-4),
        "Pr": (float, 1.0),
        "s_e": (float, None),
        "s_eps": (float, 1.5),
        "sigma_eps": (float, None),
        "closure": (str, "lattice"),
    },
    "source": {
        "enabled": (bool, True),
        "variant": (str, "plain"),
    },
    "initial": {
        "preset": (str, "acoustic-wave"),
        "amplitude": (float, 0.001),
        "width": (float, 0.1),
        "center": (float, 0.5),
        "mode": (int, 1),
    },
    "output": {
        "dir": (str, None),
        "snapshot_every": (int, None),
    },
    "advdiff": {
        "u0": (float, 0.0),
        "kappa": (float, 1.0e-3),
        "alpha": (float, None),
        "s_psi": (float, None),
    },
    "stability": {
        "u0_over_lambda": (float, 0.0),
        "s0_over_cp": (float, 0.0),
        "k_samples": (int, None),
        "equilibria": (str, "printed"),
    },
}
TOP_LEVEL_EXTRAS = ("preset", "description", "derived")

Document = Dict[str, Dict[str, Any]]


@dataclass(frozen=True)
class RunConfig:
    """Resolved run: the normalized document plus everything derived from it."""
    document: Document = field(repr=False)
    scheme: str
    name: str
    n: int
    dx: float
    lam: float
    steps: int
    t_final: float
    gas: GasModel
    transport: TransportModel
    rates: RelaxationRates
    source: str
    snapshot_every: int
    output_dir: Path
    advdiff: Optional[AdvDiffParams] = None
    reference: Optional[ReferenceState] = None

    @property
    def dt(self) -> float:
        return self.dx / self.lam

    @property
    def scheme_config(self) -> SchemeConfig:
        return SchemeConfig(dx=self.dx, lam=self.lam, gas=self.gas, transport=self.transport,
                            rates=self.rates, source=self.source)

    @property
    def initial(self) -> Dict[str, Any]:
        return self.document["initial"]

    @property
    def fd_cfl(self) -> float:
        return self.document["run"]["cfl"] or config.FD_CFL

    @property
    def fd_lam(self) -> Optional[float]:
        """Lattice speed handed to the finite-difference solver; None keeps rho nu d_x u."""
        return self.lam if self.document["transport"]["closure"] == "lattice" else None

    def with_source(self, variant: str, output_dir: Optional[Path] = None) -> "RunConfig":
        """Same run with another source variant, written under a suffixed name."""
        doc = copy.deepcopy(self.document)
        doc["source"].update(variant=variant, enabled=variant != "none")
        doc["run"].update(name=f"{self.name}-source-{variant}", dual_source=False)
        if output_dir is not None:
            doc["output"]["dir"] = str(output_dir)
        return parse_config(doc)

    def with_mesh(self, n: int) -> "RunConfig":
        doc = copy.deepcopy(self.document)
        doc["lattice"].update(n=int(n), dx=None)
        return parse_config(doc)

    def derived(self) -> Dict[str, Any]:
        values: Dict[str, Any] = {
            "lam": self.lam,
            "dx": self.dx,
            "dt": self.dt,
            "steps": self.steps,
            "t_final": self.t_final,
            "c0": self.gas.c0,
            "p0": self.gas.p0,
            "T0": self.gas.T0,
            "r": self.gas.r,
            "nu": self.transport.nu,
            "kappa": float(self.transport.kappa(self.gas.rho0, self.gas.cp)),
            "s_e": self.rates.s_e,
            "s_psi": self.rates.s_psi,
            "s_eps": self.rates.s_eps,
            "sigma_e": self.rates.sigma_e,
            "sigma_psi": self.rates.sigma_psi,
            "sigma_eps": self.rates.sigma_eps,
        }
        if self.advdiff is not None:
            values.update({
                "advdiff_alpha": self.advdiff.alpha,
                "advdiff_s_psi": self.advdiff.s_psi,
                "advdiff_sigma_psi": self.advdiff.sigma_psi,
            })
        return {k: (float(v) if isinstance(v, float) else v) for k, v in values.items()}

    def echo(self) -> Dict[str, Any]:
        """Normalized document with a ``derived`` section; reloads to an equal RunConfig."""
        echoed: Dict[str, Any] = copy.deepcopy(self.document)
        echoed["derived"] = self.derived()
        return echoed

    def echo_yaml(self) -> str:
        return yaml.safe_dump(self.echo(), sort_keys=False)


def _load_mapping(document: Union[Mapping, str, Path]) -> Mapping:
    if isinstance(document, Mapping):
        return document

    text = document
    if isinstance(document, Path) or (isinstance(document, str) and "\n" not in document
                                       and document.endswith((".yaml", ".yml"))):
        path = Path(document)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        text = path.read_text()

    try:
        loaded = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ConfigError(f"malformed run document: {getattr(e, 'problem', e)}",
                          line=mark.line + 1 if mark is not None else None) from e
    if not isinstance(loaded, Mapping):
        raise ConfigError(f"run document must be a mapping of sections, got {type(loaded).__name__}")
    return loaded


def _coerce(section: str, key: str, value: Any) -> Any:
    kind, _ = SCHEMA[section][key]
    dotted = f"{section}.{key}"
    if value is None:
        return None
    if isinstance(value, (Mapping, list, tuple)):
        raise ConfigError("values must be scalars", key=dotted)
    try:
        if kind is bool:
            if isinstance(value, str):
                if value.lower() not in ("true", "false", "yes", "no", "on", "off", "1", "0"):
                    raise ValueError(value)
                return value.lower() in ("true", "yes", "on", "1")
            return bool(value)
        if kind is int:
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(value)
            return int(value)
        return kind(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"cannot read {value!r} as {kind.__name__}", key=dotted) from e


def normalize(document: Union[Mapping, str, Path]) -> Document:
    """Expand an optional preset, check every key and fill defaults."""
    raw = _load_mapping(document)

    for top in raw:
        if top not in SCHEMA and top not in TOP_LEVEL_EXTRAS:
            raise ConfigError(f"unknown section '{top}'", key=str(top))

    base: Dict[str, Any] = {}
    preset = raw.get("preset")
    if preset is not None:
        if preset not in config.PRESETS:
            raise ConfigError(f"unknown preset '{preset}' (available: {', '.join(config.PRESETS)})",
                              key="preset")
        base = copy.deepcopy(config.PRESETS[preset])

    result: Document = {}
    for section, keys in SCHEMA.items():
        values = {key: default for key, (_, default) in keys.items()}
        for layer in (base.get(section), raw.get(section)):
            if layer is None:
                continue
            if not isinstance(layer, Mapping):
                raise ConfigError("section must be a mapping", key=section)
            for key, value in layer.items():
                if key not in keys:
                    raise ConfigError(f"unknown key '{key}' in section '{section}'", key=f"{section}.{key}")
                values[key] = _coerce(section, key, value)
        result[section] = values

    if result["run"]["name"] is None:
        result["run"]["name"] = preset or result["run"]["scheme"]
    return result


def apply_overrides(document: Union[Mapping, str, Path], overrides: Iterable[str]) -> Document:
    """Apply ``section.key=value`` assignments; values are read as YAML scalars."""
    result = normalize(document)
    for item in overrides:
        path, sep, text = item.partition("=")
        section, dot, key = path.strip().partition(".")
        if not sep or not dot:
            raise ConfigError(f"override '{item}' is not of the form section.key=value")
        if section not in SCHEMA or key not in SCHEMA[section]:
            raise ConfigError("unknown override target", key=path.strip())
        try:
            value = yaml.safe_load(text) if text.strip() else None
        except yaml.YAMLError as e:
            raise ConfigError(f"cannot read override value {text!r}", key=path.strip()) from e
        result[section][key] = _coerce(section, key, value)
    return result


def _require(condition: bool, message: str, key: str) -> None:
    if not condition:
        raise ConfigError(message, key=key)


def parse_config(document: Union[Mapping, str, Path]) -> RunConfig:
    """Resolve a run document into a RunConfig, rejecting inconsistent inputs."""
    doc = normalize(document)
    run, lattice, gas_doc, transport_doc = doc["run"], doc["lattice"], doc["gas"], doc["transport"]
    length = config.DOMAIN_LENGTH

    _require(run["scheme"] in SCHEMES, f"scheme '{run['scheme']}' not in {SCHEMES}", "run.scheme")
    _require(doc["source"]["variant"] in SOURCE_VARIANTS,
             f"variant '{doc['source']['variant']}' not in {SOURCE_VARIANTS}", "source.variant")
    _require(doc["initial"]["preset"] in INITIAL_PRESETS,
             f"initial preset '{doc['initial']['preset']}' not in {INITIAL_PRESETS}", "initial.preset")
    _require(transport_doc["closure"] in CLOSURES,
             f"closure '{transport_doc['closure']}' not in {CLOSURES}", "transport.closure")
    _require(doc["stability"]["equilibria"] in EQUILIBRIA,
             f"equilibria '{doc['stability']['equilibria']}' not in {EQUILIBRIA}", "stability.equilibria")

    if run["scheme"] == "advdiff-d1q3":
        _require(doc["initial"]["preset"] != "acoustic-wave",
                 "initial preset 'acoustic-wave' does not apply to a scalar field", "initial.preset")

    if lattice["dx"] is not None:
        _require(lattice["dx"] > 0, f"dx={lattice['dx']} must be positive", "lattice.dx")
        n = int(round(length / lattice["dx"]))
        _require(abs(n * lattice["dx"] - length) <= 1e-9 * length,
                 f"dx={lattice['dx']} does not divide the domain length {length}", "lattice.dx")
    else:
        n = lattice["n"]
    _require(n >= 4, f"n={n} below the minimum of 4 cells", "lattice.n")
    dx = length / n

    try:
        lam, nu, rates = resolve_relaxation(
            nu=transport_doc["nu"], Pr=transport_doc["Pr"], gamma=gas_doc["gamma"], dx=dx,
            lam=lattice["lam"], s_e=transport_doc["s_e"], s_eps=transport_doc["s_eps"],
            sigma_eps=transport_doc["sigma_eps"],
        )
        gas = GasModel.from_sound_speed(gas_doc["c0_over_lambda"] * lam, gamma=gas_doc["gamma"],
                                        cp=gas_doc["cp"], rho0=gas_doc["rho0"], s0=gas_doc["s0"])
        transport = TransportModel(nu=nu, Pr=transport_doc["Pr"])
    except LBMError as e:
        raise ConfigError(str(e), key="transport") from e

    dt = dx / lam
    if run["steps"] is not None:
        _require(run["steps"] >= 0, f"steps={run['steps']} must be non-negative", "run.steps")
        steps = run["steps"]
    else:
        _require(run["t_final"] >= 0, f"t_final={run['t_final']} must be non-negative", "run.t_final")
        steps = int(round(run["t_final"] / dt))
    t_final = steps * dt if run["scheme"] != "reference-fd" or run["steps"] is not None else run["t_final"]

    if run["cfl"] is not None:
        _require(0.0 < run["cfl"] < 1.0, f"cfl={run['cfl']} outside (0,1)", "run.cfl")

    advdiff = None
    if run["scheme"] == "advdiff-d1q3":
        ad = doc["advdiff"]
        try:
            advdiff = resolve_advdiff_params(u0=ad["u0"], kappa=ad["kappa"], lam=lam, dt=dt,
                                             alpha=ad["alpha"], s_psi=ad["s_psi"],
                                             s_eps=transport_doc["s_eps"])
        except LBMError as e:
            raise ConfigError(str(e), key="advdiff") from e

    st = doc["stability"]
    _require(abs(st["u0_over_lambda"]) < 1.0, f"u0_over_lambda={st['u0_over_lambda']} must stay below 1",
             "stability.u0_over_lambda")
    if st["k_samples"] is not None:
        _require(st["k_samples"] >= 8, f"k_samples={st['k_samples']} below 8", "stability.k_samples")
    reference = ReferenceState(rho0=gas.rho0, u0=st["u0_over_lambda"] * lam, s0=st["s0_over_cp"] * gas.cp, c0=gas.c0)

    output = doc["output"]
    snapshot_every = config.SNAPSHOT_EVERY if output["snapshot_every"] is None else output["snapshot_every"]
    _require(snapshot_every >= 0, f"snapshot_every={snapshot_every} must be non-negative", "output.snapshot_every")
    output_dir = Path(output["dir"]) if output["dir"] is not None else config.OUTPUT_DIR / run["name"]

    source = doc["source"]["variant"] if doc["source"]["enabled"] else "none"

    resolved = RunConfig(
        document=doc, scheme=run["scheme"], name=run["name"], n=n, dx=dx, lam=lam, steps=steps,
        t_final=t_final, gas=gas, transport=transport, rates=rates, source=source,
        snapshot_every=snapshot_every, output_dir=output_dir, advdiff=advdiff, reference=reference,
    )
    logger.debug(f"CONFIG | Resolved | Name: {resolved.name} | Scheme: {resolved.scheme} | N: {n} | "
                 f"lambda: {lam:.6g} | Steps: {steps}")
    return resolved


def load_preset(name: str, overrides: Iterable[str] = ()) -> RunConfig:
    return parse_config(apply_overrides({"preset": name}, overrides))
