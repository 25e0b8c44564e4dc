import pytest
from pydantic import ValidationError

from willmore_tori.logging_config import get_logging_config
from willmore_tori.settings import Settings, get_settings, numerics, reload_settings


def test_defaults_without_config_file(tmp_path):
    settings = Settings.from_config_file(tmp_path / "missing.yaml")
    assert settings.numerics.grid.base_resolution == 64
    assert settings.numerics.spectral.truncation == 20
    assert settings.numerics.expansion.eps_list == [0.025, 0.05, 0.075, 0.1]


def test_yaml_overrides(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text(
        "numerics:\n"
        "  spectral:\n"
        "    truncation: 6\n"
        "  workers: 2\n"
        "logging:\n"
        "  level: DEBUG\n"
    )
    settings = Settings.from_config_file(path)
    assert settings.numerics.spectral.truncation == 6
    assert settings.numerics.workers == 2
    assert settings.numerics.grid.max_resolution == 512
    assert settings.logging.level == "DEBUG"


def test_odd_quadrature_resolution_rejected(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("numerics:\n  spectral:\n    quadrature_resolution: 97\n")
    with pytest.raises(ValidationError):
        Settings.from_config_file(path)


def test_unknown_key_rejected(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("numerics:\n  grid:\n    base_resolutoin: 32\n")
    with pytest.raises(ValidationError):
        Settings.from_config_file(path)


def test_settings_are_cached_until_reload():
    first = get_settings()
    assert get_settings() is first
    assert numerics() is first.numerics
    reloaded = reload_settings()
    assert reloaded is not first
    assert get_settings() is reloaded


def test_log_files_live_in_the_log_dir(tmp_path):
    config = get_logging_config(tmp_path / "logs")
    handlers = config["handlers"]
    files = {name: handlers[name]["filename"] for name in ("file", "error_file", "report_file")}
    assert files == {
        "file": str(tmp_path / "logs" / "willmore.log"),
        "error_file": str(tmp_path / "logs" / "error.log"),
        "report_file": str(tmp_path / "logs" / "reports.jsonl"),
    }
    assert handlers["report_file"]["formatter"] == "json"
    assert (tmp_path / "logs").is_dir()
