import pytest
import yaml

from app.config import config
from app.core.errors import ConfigError
from app.services.run_config import apply_overrides, load_preset, normalize, parse_config


def test_fig1_preset_values():
    cfg = load_preset("fig1")
    assert cfg.scheme == "ns-d1q3q3"
    assert cfg.gas.gamma == 1.4
    assert cfg.transport.Pr == 1.0
    assert cfg.gas.c0 == pytest.approx(cfg.lam / 2)
    assert cfg.gas.s0 == 0.0
    assert cfg.transport.nu == pytest.approx(6.579e-4)
    assert cfg.dx == pytest.approx(1 / 40)
    assert cfg.initial["amplitude"] == 0.001
    assert cfg.t_final == pytest.approx(3.0)
    assert cfg.steps == 120
    assert cfg.source == "plain"


def test_fig3_preset_only_changes_amplitude():
    fig1, fig3 = load_preset("fig1"), load_preset("fig3")
    assert fig3.initial["amplitude"] == 0.1
    assert fig3.dx == fig1.dx
    assert fig3.transport == fig1.transport
    assert fig3.gas == fig1.gas


def test_fig4_is_a_dual_run_of_fig3():
    fig4 = load_preset("fig4")
    assert fig4.document["run"]["dual_source"]
    assert fig4.initial == load_preset("fig3").initial


def test_lambda_resolved_from_viscosity_and_rate():
    cfg = parse_config({
        "lattice": {"n": 40},
        "transport": {"nu": 6.579e-4, "s_e": 1.9},
    })
    assert cfg.lam == pytest.approx(1.0, abs=1e-3)
    assert cfg.rates.s_e == 1.9


def test_consistent_viscosity_and_rate_accepted():
    cfg = parse_config({"lattice": {"n": 40, "lam": 1.0}, "transport": {"nu": 6.579e-4, "s_e": 1.9}})
    assert cfg.rates.sigma_e * cfg.lam * cfg.dx == pytest.approx(6.579e-4, rel=1e-3)


def test_conflicting_viscosity_and_rate_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config({"lattice": {"n": 40, "lam": 1.0}, "transport": {"nu": 1e-3, "s_e": 1.9}})
    assert err.value.key == "transport"
    assert "conflicts" in str(err.value)


def test_derived_rates_follow_the_viscosity_link():
    cfg = load_preset("fig1")
    derived = cfg.derived()
    assert derived["sigma_psi"] == pytest.approx(1.5 * 1.4 * derived["sigma_e"], rel=1e-12)
    assert derived["s_eps"] == 1.5
    assert derived["c0"] == pytest.approx(0.5)
    assert derived["kappa"] == pytest.approx(6.579e-4)


def test_sigma_eps_overrides_s_eps():
    cfg = parse_config({"transport": {"sigma_eps": 0.25}})
    assert cfg.rates.s_eps == pytest.approx(4.0 / 3.0)


def test_unknown_key_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config({"gas": {"gama": 1.4}})
    assert err.value.key == "gas.gama"


def test_unknown_section_and_preset_rejected():
    with pytest.raises(ConfigError):
        parse_config({"physics": {}})
    with pytest.raises(ConfigError) as err:
        parse_config({"preset": "fig9"})
    assert err.value.key == "preset"


def test_yaml_error_reports_line():
    text = "run:\n  scheme: ns-d1q3q3\nlattice:\n  n: [40\n"
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert err.value.line is not None
    assert err.value.line >= 4


def test_bad_value_names_key():
    with pytest.raises(ConfigError) as err:
        parse_config({"lattice": {"n": "forty"}})
    assert err.value.key == "lattice.n"


def test_alpha_bound_named_in_error():
    with pytest.raises(ConfigError, match=r"alpha=1.2 outside \(-2,1\)") as err:
        parse_config({"preset": "advdiff-gauss", "advdiff": {"alpha": 1.2}})
    assert err.value.key == "advdiff"


def test_advdiff_rejects_acoustic_initial_state():
    with pytest.raises(ConfigError):
        parse_config({"run": {"scheme": "advdiff-d1q3"}, "initial": {"preset": "acoustic-wave"}})


@pytest.mark.parametrize("lattice", [{"n": 3}, {"dx": 0.3}, {"dx": -0.1}])
def test_mesh_validation(lattice):
    with pytest.raises(ConfigError):
        parse_config({"lattice": lattice})


def test_dx_sets_the_mesh():
    assert parse_config({"lattice": {"dx": 0.0125}}).n == 80


def test_stability_reference_is_checked_at_load():
    with pytest.raises(ConfigError):
        parse_config({"stability": {"u0_over_lambda": 1.0}})
    cfg = parse_config({"stability": {"u0_over_lambda": 0.15, "s0_over_cp": 0.2}})
    assert cfg.reference.u0 == pytest.approx(0.15 * cfg.lam)
    assert cfg.reference.s0 == pytest.approx(0.2)


def test_overrides_use_dotted_paths():
    doc = apply_overrides({"preset": "fig1"}, ["initial.amplitude=0.05", "source.enabled=false", "lattice.n=80"])
    cfg = parse_config(doc)
    assert cfg.initial["amplitude"] == 0.05
    assert cfg.source == "none"
    assert cfg.n == 80
    with pytest.raises(ConfigError):
        apply_overrides({}, ["amplitude=0.05"])
    with pytest.raises(ConfigError):
        apply_overrides({}, ["initial.sharpness=2"])


def test_default_output_dir(output_dir):
    assert load_preset("fig2").output_dir == output_dir / "fig2"


def test_echo_reloads_to_the_same_config(tmp_path):
    cfg = load_preset("fig2", ["lattice.n=80", "output.snapshot_every=10"])
    path = tmp_path / "echo.yaml"
    path.write_text(cfg.echo_yaml())
    reloaded = parse_config(path)
    assert reloaded == cfg
    assert yaml.safe_load(path.read_text())["derived"]["steps"] == cfg.steps


def test_with_source_and_mesh():
    cfg = load_preset("fig3")
    off = cfg.with_source("none")
    assert off.source == "none"
    assert off.name == "fig3-source-none"
    fine = cfg.with_mesh(160)
    assert fine.n == 160
    assert fine.t_final == pytest.approx(cfg.t_final)
    assert fine.lam == cfg.lam


def test_fd_runs_keep_the_requested_final_time():
    cfg = parse_config({"run": {"scheme": "reference-fd", "t_final": 0.37}})
    assert cfg.t_final == 0.37


def test_normalize_fills_defaults():
    doc = normalize({})
    assert doc["run"]["name"] == "ns-d1q3q3"
    assert doc["transport"]["s_eps"] == 1.5
    assert set(doc) == set(normalize({"preset": "fig1"}))
    assert config.PRESETS["fig1"]["lattice"]["n"] == 40


def test_stab7_refines_at_fixed_rate():
    coarse = load_preset("stab7")
    assert coarse.transport.nu == pytest.approx(6.579e-4, rel=1e-3)

    fine = load_preset("stab7", ["lattice.n=80"])
    assert fine.rates.s_e == 1.9
    assert fine.lam == 1.0
    assert fine.transport.nu == pytest.approx((1.0 / 1.9 - 0.5) / 80, rel=1e-12)


@pytest.mark.parametrize("key, value", [("transport.closure", "stokes"), ("stability.equilibria", "exact")])
def test_solver_choices_validated(key, value):
    with pytest.raises(ConfigError) as err:
        load_preset("fig1", [f"{key}={value}"])
    assert err.value.key == key


def test_fd_closure_selects_the_lattice_speed():
    cfg = load_preset("fig1", ["run.scheme=reference-fd"])
    assert cfg.document["transport"]["closure"] == "lattice"
    assert cfg.fd_lam == cfg.lam
    assert load_preset("fig1", ["transport.closure=navier-stokes"]).fd_lam is None
    assert cfg.document["stability"]["equilibria"] == "printed"
