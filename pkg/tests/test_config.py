"""
Saved defaults in the settings file.
"""
import os

import pytest

from csort.config import DEFAULT_RHO, DEFAULT_ZETA, Preferences, get_config_folder
from csort.enums import Method
from csort.errors import InputError


@pytest.fixture(name="prefs")
def fixture_prefs(tmp_path, monkeypatch) -> Preferences:
    monkeypatch.setattr("sys.platform", "linux")
    monkeypatch.setenv("XDG_CONFIG_HOME", str(tmp_path))
    return Preferences()


def test_config_folder(prefs, tmp_path):
    assert get_config_folder() == os.path.join(str(tmp_path), "csort")
    assert os.path.isdir(get_config_folder())
    assert prefs.config_file == os.path.join(str(tmp_path), "csort", "settings.ini")


def test_defaults(prefs):
    assert prefs.get_cost_defaults() == {
        "zeta_p": DEFAULT_ZETA,
        "rho_p": DEFAULT_RHO,
        "zeta_k": DEFAULT_ZETA,
        "rho_k": DEFAULT_RHO,
    }
    assert prefs.get_method() == Method.EFFICIENT
    assert prefs.get_threads() == (os.cpu_count() or 1)


def test_settings_persist(prefs):
    prefs.set_cost_default("rho_k", 2.5)
    prefs.set_method(Method.LAYERED_POSITIVE)
    prefs.set_threads(2)

    reloaded = Preferences(prefs.config_file)
    assert reloaded.get_cost_defaults()["rho_k"] == 2.5
    assert reloaded.get_cost_defaults()["zeta_k"] == DEFAULT_ZETA
    assert reloaded.get_method() == Method.LAYERED_POSITIVE
    assert reloaded.get_threads() == 2

    reloaded.set_threads(0)
    assert reloaded.get_threads() == (os.cpu_count() or 1)


def test_unknown_cost_key(prefs):
    with pytest.raises(KeyError):
        prefs.set_cost_default("eta_p", 1.0)


def test_malformed_values_fall_back(prefs, caplog):
    with open(prefs.config_file, "w", encoding="utf-8") as f:
        f.write("[Cost]\nzeta_p = half\n\n[Solver]\nmethod = fastest\n")

    reloaded = Preferences(prefs.config_file)
    assert reloaded.get_cost_defaults()["zeta_p"] == DEFAULT_ZETA
    assert reloaded.get_method() == Method.EFFICIENT
    assert "zeta_p" in caplog.text
    assert "fastest" in caplog.text


def test_config_folder_without_variable(tmp_path, monkeypatch):
    monkeypatch.setattr("sys.platform", "darwin")
    monkeypatch.setenv("HOME", str(tmp_path))
    assert get_config_folder() == os.path.join(str(tmp_path), "Library", "Application Support", "csort")

    monkeypatch.setattr("sys.platform", "linux")
    monkeypatch.setenv("XDG_CONFIG_HOME", "")
    assert get_config_folder() == os.path.join(str(tmp_path), ".config", "csort")


def test_config_folder_unknown_platform(monkeypatch):
    monkeypatch.setattr("sys.platform", "plan9")
    with pytest.raises(InputError, match="plan9"):
        get_config_folder()


@pytest.mark.parametrize("content", [b"zeta_p = 0.3\n", b"[Cost]\nzeta_p = \xff\n"])
def test_unreadable_settings_file(tmp_path, content, caplog):
    path = tmp_path / "settings.ini"
    path.write_bytes(content)
    prefs = Preferences(str(path))
    assert prefs.get_cost_defaults()["zeta_p"] == DEFAULT_ZETA
    assert "unreadable settings file" in caplog.text


def test_settings_folder_missing(tmp_path):
    prefs = Preferences(str(tmp_path / "missing" / "settings.ini"))
    assert prefs.get_threads() == (os.cpu_count() or 1)
    with pytest.raises(InputError, match="Cannot save settings"):
        prefs.set_threads(2)
