"""
Parameter files, overrides and saved presets
"""

import json
import logging
import math
import os
import pathlib
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional

from src.core.errors import ConfigError, ParameterError
from src.core.model import DimerParams, apply_bath_loss, validate
from src.core.wavepackets import PulseShape

logger = logging.getLogger(__name__)

PARAM_KEYS = ("omega1", "omega2", "u1", "u2", "j", "v1", "v2", "gamma_bath")
ALIAS_KEYS = ("u", "omega", "vsq")
PULSE_KEYS = ("shape", "sigma_over_j", "k0_over_j", "density")
KNOWN_KEYS = PARAM_KEYS + ALIAS_KEYS + PULSE_KEYS

DEFAULTS: Dict[str, Any] = {
    "omega1": 0.0, "omega2": 0.0, "u1": 0.0, "u2": 0.0, "j": 1.0,
    "v1": 0.2, "v2": 0.2, "gamma_bath": 0.0,
    "shape": "gaussian", "sigma_over_j": 0.005, "k0_over_j": 0.0, "density": 1,
}


@dataclass(frozen=True)
class RunConfig:
    """Class representing resolved physical and pulse settings of a run"""

    params: DimerParams
    shape: PulseShape = PulseShape.GAUSSIAN
    sigma: float = 0.005
    k0: float = 0.0
    density: int = 1
    values: Dict[str, Any] = field(default_factory=dict, compare=False)


def _expand_aliases(values: Mapping[str, Any]) -> Dict[str, Any]:
    expanded = {}
    for key, value in values.items():
        if key == "u":
            expanded.update(u1=value, u2=value)
        elif key == "omega":
            expanded.update(omega1=value, omega2=value)
        elif key == "vsq":
            if not isinstance(value, (int, float)) or value <= 0:
                raise ConfigError("vsq must be a positive number", key=key)
            root = math.sqrt(value)
            expanded.update(v1=root, v2=root)
        else:
            expanded[key] = value
    return expanded


def check_keys(values: Mapping[str, Any], source: Optional[str] = None) -> None:
    """Reject keys that no setting answers to

    Raises:
        ConfigError: naming the first unknown key
    """
    for key in values:
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown key '{key}'", source=source, key=key)


def load_config_file(path) -> Dict[str, Any]:
    """Read a flat JSON parameter file

    Raises:
        ConfigError: for unreadable files, malformed JSON or unknown keys
    """
    source = str(path)
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(e.msg, source=source, line=e.lineno, column=e.colno) from None
    except OSError as e:
        raise ConfigError(f"cannot read config file: {e.strerror}", source=source) from None
    if not isinstance(data, dict):
        raise ConfigError("top level must be a JSON object", source=source)
    check_keys(data, source)
    logger.info("loaded config %s", source)
    return _expand_aliases(data)


def parse_override(text: str) -> Dict[str, Any]:
    """Parse one --set key=value argument, the value read as JSON when possible"""
    key, sep, raw = text.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigError(f"expected key=value, got '{text}'", source="--set")
    check_keys({key: None}, "--set")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw.strip()
    return _expand_aliases({key: value})


def _number(values: Mapping[str, Any], key: str) -> float:
    value = values[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"'{key}' must be a number, got {value!r}", key=key)
    return float(value)


def resolve(layers: Iterable[Mapping[str, Any]]) -> RunConfig:
    """Merge setting layers, later ones winning, and build validated parameters

    Raises:
        ConfigError: for bad values, naming the key
    """
    values = dict(DEFAULTS)
    for layer in layers:
        check_keys(layer)
        values.update(_expand_aliases(layer))
    numbers = {key: _number(values, key) for key in PARAM_KEYS}
    try:
        params = validate(DimerParams(
            omega1=complex(numbers["omega1"]), omega2=complex(numbers["omega2"]),
            u1=numbers["u1"], u2=numbers["u2"], j_hop=numbers["j"],
            v1=numbers["v1"], v2=numbers["v2"],
        ))
        params = apply_bath_loss(params, numbers["gamma_bath"])
    except ParameterError as e:
        key = "j" if e.field == "j_hop" else e.field
        raise ConfigError(str(e), key=key) from None
    try:
        shape = PulseShape(str(values["shape"]).lower())
    except ValueError:
        raise ConfigError(f"unknown pulse shape '{values['shape']}'", key="shape") from None
    sigma = _number(values, "sigma_over_j") * params.j_hop
    if not sigma > 0:
        raise ConfigError("sigma_over_j must be positive", key="sigma_over_j")
    density = values["density"]
    if isinstance(density, bool) or not isinstance(density, int) or density < 1:
        raise ConfigError("density must be a positive integer", key="density")
    return RunConfig(params=params, shape=shape, sigma=sigma,
                     k0=_number(values, "k0_over_j") * params.j_hop,
                     density=density, values=values)


class PresetManager:
    """Manager for named parameter sets stored between runs"""

    def __init__(self, config_dir: Optional[pathlib.Path] = None):
        """Initialize the preset store

        Args:
            config_dir: directory holding presets.json, the user config
                directory if None
        """
        self.presets: Dict[str, Dict[str, Any]] = {}
        self.config_dir = pathlib.Path(config_dir) if config_dir else self._get_config_dir()
        self.load_presets()

    def _get_config_dir(self) -> pathlib.Path:
        """Get the configuration directory for the application"""
        override = os.environ.get("PHOTON_DIMER_CONFIG_DIR")
        if override:
            return pathlib.Path(override)
        return pathlib.Path.home() / ".config" / "photon-dimer"

    @property
    def presets_file(self) -> pathlib.Path:
        return self.config_dir / "presets.json"

    def get_preset_names(self) -> List[str]:
        return sorted(self.presets)

    def get_preset(self, name: str) -> Dict[str, Any]:
        """Get a preset by name

        Raises:
            ConfigError: if no preset has that name
        """
        if name not in self.presets:
            raise ConfigError(f"no preset named '{name}'", key=name)
        return dict(self.presets[name])

    def save_preset(self, name: str, values: Mapping[str, Any]) -> None:
        """Store a parameter set under a name, replacing any previous one"""
        check_keys(values)
        self.presets[name] = dict(values)
        self.save_presets()

    def remove_preset(self, name: str) -> bool:
        """Remove a preset; returns False if it did not exist"""
        if name not in self.presets:
            return False
        del self.presets[name]
        self.save_presets()
        return True

    def save_presets(self) -> None:
        """Save presets to the config directory"""
        try:
            self.config_dir.mkdir(parents=True, exist_ok=True)
            with open(self.presets_file, "w") as f:
                json.dump(self.presets, f, indent=2, sort_keys=True)
            logger.info("saved %d presets to %s", len(self.presets), self.presets_file)
        except OSError as e:
            raise ConfigError(f"cannot save presets: {e.strerror}",
                              source=str(self.presets_file)) from None

    def load_presets(self) -> None:
        """Load presets from the config directory, if any"""
        if not self.presets_file.exists():
            return
        try:
            with open(self.presets_file, "r") as f:
                loaded = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(e.msg, source=str(self.presets_file),
                              line=e.lineno, column=e.colno) from None
        except OSError as e:
            logger.warning("error loading presets: %s", e)
            return
        self.presets.update(loaded)
