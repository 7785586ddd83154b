from fractions import Fraction

import pytest

from config import CONFIG_ENV_VAR, load_field_config, read_config_file
from core.access_control import default_backend, get_allowed_backends, validate_backend_access, validate_verb
from core.errors import ConfigError, UnsupportedBackend
from core.numeric import DEFAULT_CONFIG


@pytest.fixture
def config_file(tmp_path, monkeypatch):
    def write(text):
        path = tmp_path / "btrack.env"
        path.write_text(text)
        monkeypatch.setenv(CONFIG_ENV_VAR, str(path))
        return path

    return write


def test_defaults_without_file():
    assert load_field_config() is DEFAULT_CONFIG
    assert read_config_file() == {}


def test_file_settings(config_file):
    config_file("TRUNCATION_ORDER=16\nst_tolerance=1e-6\n")
    config = load_field_config()
    assert config.truncation_order == 16
    assert config.st_tolerance == Fraction(1, 10 ** 6)
    assert config.working_precision == 50


def test_flags_beat_file(config_file):
    config_file("truncation_order=16\nsequence_cutoff=1024\n")
    config = load_field_config({"truncation_order": 8, "working_precision": None})
    assert config.truncation_order == 8
    assert config.sequence_cutoff == 1024
    assert config.working_precision == 50


@pytest.mark.parametrize("text", ["colour=blue\n", "truncation_order=many\n", "st_tolerance=-1\n"])
def test_bad_files(config_file, text):
    config_file(text)
    with pytest.raises(ConfigError):
        load_field_config()


def test_missing_file(monkeypatch, tmp_path):
    monkeypatch.setenv(CONFIG_ENV_VAR, str(tmp_path / "absent.env"))
    with pytest.raises(ConfigError):
        load_field_config()


def test_unknown_override():
    with pytest.raises(ConfigError):
        load_field_config({"colour": "blue"})


def test_backend_access():
    assert validate_verb("hsum")
    assert validate_backend_access("derive", "ratfunc")
    assert get_allowed_backends("ivt") == ["lc"]
    assert default_backend("sumthm") == "omega"
    with pytest.raises(UnsupportedBackend):
        validate_backend_access("ivt", "omega")
    with pytest.raises(UnsupportedBackend):
        validate_verb("integrate")
