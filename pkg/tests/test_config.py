import pytest
from app.config import Config
from app.services.run_config import SCHEMA, SCHEMES

def test_config_defaults():
    """Test that config has correct default values."""
    config = Config()

    assert config.SNAPSHOT_EVERY == 0
    assert config.CSV_SIGNIFICANT_DIGITS == 17
    assert config.FD_CFL == 0.4
    assert config.STABILITY_SAMPLES == 512
    assert config.STABILITY_TOLERANCE == 1e-10
    assert config.DEFAULT_MESHES == [40, 80, 160]

def test_config_presets():
    """Test that every preset only uses known sections, keys and schemes."""
    config = Config()

    for name in ("fig1", "fig2", "fig3", "fig4", "stab7"):
        assert name in config.PRESETS
    for name, preset in config.PRESETS.items():
        assert "description" in preset
        assert preset.get("run", {}).get("scheme", "ns-d1q3q3") in SCHEMES
        for section, values in preset.items():
            if section == "description":
                continue
            assert set(values) <= set(SCHEMA[section]), f"{name}.{section}"

@pytest.mark.parametrize("preset, amplitude", [("fig1", 0.001), ("fig2", 0.01), ("fig3", 0.1), ("fig4", 0.1)])
def test_config_figure_amplitudes(preset, amplitude):
    assert Config.PRESETS[preset]["initial"]["amplitude"] == amplitude

def test_config_env_override(monkeypatch):
    """Test that environment variables can be read by Config class."""
    monkeypatch.setenv("FD_CFL", "0.25")
    monkeypatch.setenv("STABILITY_SAMPLES", "4")
    monkeypatch.setenv("CSV_SIGNIFICANT_DIGITS", "40")

    # Create new config instance that will read these env vars
    import importlib
    from app import config as config_module
    importlib.reload(config_module)

    assert config_module.config.FD_CFL == 0.25
    assert config_module.config.STABILITY_SAMPLES == 8  # clamped
    assert config_module.config.CSV_SIGNIFICANT_DIGITS == 17  # clamped

    # Reload again to restore defaults
    for name in ("FD_CFL", "STABILITY_SAMPLES", "CSV_SIGNIFICANT_DIGITS"):
        monkeypatch.delenv(name)
    importlib.reload(config_module)
