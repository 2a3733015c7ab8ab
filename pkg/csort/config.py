"""
Configuration to persist default solver settings between sessions.
"""
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program. If not, see <http://www.gnu.org/licenses/>.
#
# Copyright (C) 2025 The csort authors
#
import configparser
import logging
import os
import sys

from csort.enums import Method
from csort.errors import InputError

log = logging.getLogger(__name__)

# Calibration used for the quantitative analysis: square root cost on both sides
DEFAULT_ZETA = 0.5
DEFAULT_RHO = 1.0


# Per-platform base folder: environment variable, and fallback below the home folder
CONFIG_BASES = {
    "linux": ("XDG_CONFIG_HOME", (".config",)),
    "win32": ("LOCALAPPDATA", ("AppData", "Local")),
    "darwin": (None, ("Library", "Application Support")),
}


def get_config_folder() -> str:
    """
    Folder holding settings.ini, created on first use.
    """
    if sys.platform not in CONFIG_BASES:
        raise InputError(f"No settings folder known for platform {sys.platform!r}")

    variable, fallback = CONFIG_BASES[sys.platform]
    base = os.getenv(variable) if variable else None
    config_dir = os.path.join(base or os.path.join(os.path.expanduser("~"), *fallback), "csort")
    os.makedirs(config_dir, exist_ok=True)
    return config_dir


class Preferences:
    """
    Persistent defaults for the command line, overridden by explicit flags.
    """
    def __init__(self, config_file: str|None = None):
        self.config = configparser.ConfigParser()
        self.config_file = config_file or os.path.join(get_config_folder(), "settings.ini")
        try:
            self.config.read(self.config_file, encoding="utf-8")
        except (configparser.Error, UnicodeDecodeError) as e:
            log.warning("Ignoring unreadable settings file %s: %s", self.config_file, e)
            self.config = configparser.ConfigParser()

    def _stored(self, section: str, key: str) -> str:
        """Raw value of a setting, empty when it was never saved"""
        return self.config.get(section, key, fallback="").strip()

    def _store(self, section: str, key: str, value: str):
        """Change one setting and rewrite the whole file"""
        if not self.config.has_section(section):
            self.config.add_section(section)
        self.config.set(section, key, value)
        try:
            with open(self.config_file, "w", encoding="utf-8") as f:
                self.config.write(f)
        except OSError as e:
            raise InputError(f"Cannot save settings to {self.config_file}: {e.strerror}") from e

    def _get_float(self, section: str, key: str, default: float) -> float:
        raw = self._stored(section, key)
        if not raw:
            return default
        try:
            return float(raw)
        except ValueError:
            log.warning("Ignoring malformed setting %s.%s = %r in %s", section, key, raw, self.config_file)
            return default

    def get_cost_defaults(self) -> dict[str, float]:
        """Default power cost parameters for both sides of the market"""
        return {
            "zeta_p": self._get_float("Cost", "zeta_p", DEFAULT_ZETA),
            "rho_p": self._get_float("Cost", "rho_p", DEFAULT_RHO),
            "zeta_k": self._get_float("Cost", "zeta_k", DEFAULT_ZETA),
            "rho_k": self._get_float("Cost", "rho_k", DEFAULT_RHO),
        }

    def set_cost_default(self, key: str, value: float):
        """Remember a cost parameter, e.g. zeta_p"""
        if key not in ("zeta_p", "rho_p", "zeta_k", "rho_k"):
            raise KeyError(key)
        self._store("Cost", key, repr(float(value)))

    def get_method(self) -> Method:
        """Default solver method"""
        raw = self._stored("Solver", "method")
        try:
            return Method.from_label(raw) if raw else Method.EFFICIENT
        except ValueError:
            log.warning("Ignoring unknown solver method %r in %s", raw, self.config_file)
            return Method.EFFICIENT

    def set_method(self, method: Method):
        """Remember the solver method"""
        self._store("Solver", "method", method.label)

    def get_threads(self) -> int:
        """Number of threads used for per-layer solves, defaults to available cores"""
        threads = int(self._get_float("Solver", "threads", 0))
        if threads > 0:
            return threads
        return os.cpu_count() or 1

    def set_threads(self, threads: int):
        """Remember the thread count, 0 restores the default"""
        self._store("Solver", "threads", str(int(threads)))

    def items(self) -> dict[str, dict[str, str]]:
        """Everything stored in the file, for display"""
        return {section: dict(self.config.items(section)) for section in self.config.sections()}
