"""This module provides the DeviceConfig, which loads, validates and updates a
device file and builds the domain objects it describes.

A device file is a JSON document:

```json
{
  "schema_version": 1,
  "units": {"e_c": "GHz", "e_j": "GHz", "...": "..."},
  "settings": {"cutoff": 40, "levels": 12, "seed": 0, "temperature": 0.01},
  "transmons": {"Q5": {"e_c": 0.099, "e_j": [32.191], "resonator": "R5"}},
  "resonators": {"R5": {"f_r": 6.468937, "g": 0.0281, "kappa": 0.00055}},
  "couplings": [{"a": "Q1", "b": "Q2", "j": 0.00159}],
  "noise": {"default": {"x_qp": 1e-8, "gap": 200.0, "q_diel0": 3e6, "epsilon": 0.7}},
  "tone_sets": {"three-tone": {"tones": [[6.46, 0.1, 0.0]], "demod_freqs": [6.46], "integration": 2.2}}
}
```

**Usage:**
```python
device = DeviceConfig("q5.device.json")
model = device.transmon_model("Q5")
device.update_config("cutoff", 60, temporary=True)
```
"""

import json

import numpy as np

from ..dispersive import ResonatorModel
from ..errors import DeviceFileError, InvalidModelError
from ..hamiltonian import DEFAULT_CUTOFF, MAX_CUTOFF, TransmonModel
from ..noise_budget import DEFAULT_TEMPERATURE, NoiseParams, T1Series
from ..paramfit import ObservationSet
from ..readout.simulation import ToneSet
from .sections import (
    UNITS,
    CouplingConfig,
    NoiseConfig,
    ResonatorConfig,
    ToneSetConfig,
    TransmonConfig,
    validate_value,
)

SCHEMA_VERSION = 1
DEFAULT_LEVELS = 12


class DeviceConfig:
    """
    Device-file handler for quditkit.

    Loads a device file, validates every section, resolves names, and builds
    models. Supports temporary (in-memory) and permanent (file-persisted)
    updates of the ``settings`` keys.

    Attributes:
        config_file (str): Path to the device file.
        schema_version (int): Schema version of the document.
        units (dict): Unit annotation per field.
        cutoff (int): Charge-basis cutoff.
        levels (int): Levels retained by default.
        seed (int): Seed for stochastic commands.
        temperature (float): Bath temperature in K.
        transmons (dict[str, TransmonConfig]): Transmons by name.
        resonators (dict[str, ResonatorConfig]): Resonators by name.
        couplings (list[CouplingConfig]): Couplings.
        noise (dict[str, NoiseConfig]): Noise parameter sets by name.
        tone_sets (dict[str, ToneSetConfig]): Tone sets by name.
        CONFIG_SCHEMA (dict): Validation schema for the settings keys.
    """

    CONFIG_SCHEMA = {
        "cutoff": {"type": int, "min": 1, "max": MAX_CUTOFF},
        "levels": {"type": int, "min": 2, "max": 60},
        "seed": {"type": int, "min": 0, "max": 2**32 - 1},
        "temperature": {"type": (int, float), "min": 1e-6, "max": 10.0},
    }

    def __init__(self, config_path: str) -> None:
        """
        Initializes the DeviceConfig by loading the given device file.

        Args:
            config_path (str): Path to the device file.

        Raises:
            FileNotFoundError: If the device file does not exist.
            DeviceFileError: If the document is malformed, fails validation or
                holds an unresolved reference.
        """
        self.config_file = config_path
        with open(self.config_file, "r") as f:
            try:
                json_data = json.loads(f.read())
            except json.JSONDecodeError as e:
                raise DeviceFileError(f"{config_path} is not valid JSON: {e}") from e
        self._load(json_data)

    @classmethod
    def from_dict(cls, json_data: dict, config_path: str = "") -> "DeviceConfig":
        """Builds a DeviceConfig from an in-memory document."""
        device = cls.__new__(cls)
        device.config_file = config_path
        device._load(json_data)
        return device

    def _load(self, json_data: dict) -> None:
        try:
            self.schema_version: int = json_data["schema_version"]
            if self.schema_version != SCHEMA_VERSION:
                raise ValueError(f"schema_version {self.schema_version} is not {SCHEMA_VERSION}")

            self.units: dict = dict(json_data.get("units", {}))
            for field, unit in self.units.items():
                if UNITS.get(field) != unit:
                    raise ValueError(f"field {field!r} is annotated {unit!r}, expected {UNITS.get(field)!r}")

            settings = json_data.get("settings", {})
            for key, value in settings.items():
                self.validate(key, value)
            self.cutoff: int = settings.get("cutoff", DEFAULT_CUTOFF)
            self.levels: int = settings.get("levels", DEFAULT_LEVELS)
            self.seed: int = settings.get("seed", 0)
            self.temperature: float = settings.get("temperature", DEFAULT_TEMPERATURE)

            self.transmons: dict[str, TransmonConfig] = {
                name: TransmonConfig(name, data) for name, data in json_data.get("transmons", {}).items()
            }
            self.resonators: dict[str, ResonatorConfig] = {
                name: ResonatorConfig(name, data) for name, data in json_data.get("resonators", {}).items()
            }
            self.couplings: list[CouplingConfig] = [
                CouplingConfig(f"coupling[{k}]", data) for k, data in enumerate(json_data.get("couplings", []))
            ]
            self.noise: dict[str, NoiseConfig] = {
                name: NoiseConfig(name, data) for name, data in json_data.get("noise", {}).items()
            }
            self.tone_sets: dict[str, ToneSetConfig] = {
                name: ToneSetConfig(name, data) for name, data in json_data.get("tone_sets", {}).items()
            }
        except DeviceFileError:
            raise
        except (KeyError, TypeError, ValueError, AttributeError) as e:
            raise DeviceFileError(f"invalid device file {self.config_file!r}: {e}") from e
        self._resolve()

    def _resolve(self) -> None:
        for transmon in self.transmons.values():
            resonator = getattr(transmon, "resonator", None)
            if resonator is not None and resonator not in self.resonators:
                raise DeviceFileError(f"transmon {transmon.name!r} references unknown resonator {resonator!r}")
        for coupling in self.couplings:
            for end in (coupling.a, coupling.b):
                if end not in self.transmons:
                    raise DeviceFileError(f"{coupling.name} references unknown transmon {end!r}")

    # validates values from input
    def validate(self, key: str, value) -> None:
        """
        Validates a settings value against its schema.

        Args:
            key (str): The settings key to validate.
            value: The value to validate.

        Raises:
            KeyError: If the key is not a settings key.
            TypeError: If the value is not of the expected type.
            ValueError: If the value is out of the allowed range.
        """
        validate_value(self.CONFIG_SCHEMA, key, value)

    # permanently updates values
    def _save_config(self, key: str, value) -> None:
        """
        Saves a settings value to the device file.

        Args:
            key (str): The settings key to save.
            value: The value to save.
        """
        with open(self.config_file, "r") as f:
            json_data = json.loads(f.read())

        json_data.setdefault("settings", {})[key] = value

        with open(self.config_file, "w") as f:
            f.write(json.dumps(json_data, indent=2))

    # handles temp or permanent updates
    def update_config(self, key: str, value, temporary: bool) -> None:
        """
        Updates a settings value, either temporarily (in memory) or permanently (persisted to file).

        Args:
            key (str): The settings key to update.
            value: The new value to set.
            temporary (bool): If True, update only in memory; if False, persist to file.

        Raises:
            KeyError: If the key is not a settings key.
            TypeError: If the value is not of the expected type.
            ValueError: If the value is out of the allowed range.
        """
        self.validate(key, value)
        if not temporary:
            self._save_config(key, value)
        setattr(self, key, value)

    def to_dict(self) -> dict:
        """The canonical device document."""
        return {
            "schema_version": self.schema_version,
            "units": dict(self.units),
            "settings": {
                "cutoff": self.cutoff,
                "levels": self.levels,
                "seed": self.seed,
                "temperature": self.temperature,
            },
            "transmons": {name: t.to_dict() for name, t in self.transmons.items()},
            "resonators": {name: r.to_dict() for name, r in self.resonators.items()},
            "couplings": [c.to_dict() for c in self.couplings],
            "noise": {name: n.to_dict() for name, n in self.noise.items()},
            "tone_sets": {name: s.to_dict() for name, s in self.tone_sets.items()},
        }

    def dump(self, path: str) -> None:
        """Writes the canonical document to ``path``."""
        with open(path, "w") as f:
            f.write(json.dumps(self.to_dict(), indent=2, sort_keys=True))
            f.write("\n")

    def _lookup(self, table: dict, kind: str, name: str | None):
        if name is None:
            if len(table) != 1:
                raise DeviceFileError(f"device file has {len(table)} {kind} entries; name one of {sorted(table)}")
            return next(iter(table.values()))
        if name not in table:
            raise DeviceFileError(f"unknown {kind} {name!r}; known: {sorted(table)}")
        return table[name]

    def _model(self, build, *args, **kwargs):
        try:
            return build(*args, **kwargs)
        except InvalidModelError as e:
            raise DeviceFileError(str(e)) from e

    def transmon_model(self, name: str | None = None) -> TransmonModel:
        """The TransmonModel of transmon ``name`` at the configured cutoff."""
        transmon = self._lookup(self.transmons, "transmon", name)
        return self._model(
            TransmonModel,
            e_c=transmon.e_c,
            e_j=tuple(transmon.e_j),
            n_g=getattr(transmon, "n_g", 0.0),
            cutoff=self.cutoff,
            alternating=getattr(transmon, "alternating", False),
        )

    def resonator_model(self, name: str | None = None) -> ResonatorModel:
        """The ResonatorModel of resonator ``name``."""
        resonator = self._lookup(self.resonators, "resonator", name)
        split = getattr(resonator, "kappa_split", None)
        return self._model(
            ResonatorModel,
            f_r=resonator.f_r,
            g=resonator.g,
            kappa=resonator.kappa,
            kappa_split=None if split is None else tuple(split),
        )

    def resonator_for(self, transmon: str | None = None) -> ResonatorModel:
        """The readout resonator of a transmon.

        Raises:
            DeviceFileError: If the transmon names no resonator.
        """
        config = self._lookup(self.transmons, "transmon", transmon)
        name = getattr(config, "resonator", None)
        if name is None:
            raise DeviceFileError(f"transmon {config.name!r} has no resonator")
        return self.resonator_model(name)

    def noise_params(self, name: str | None = None) -> NoiseParams:
        """NoiseParams of noise set ``name``; the temperature defaults to the settings value."""
        noise = self._lookup(self.noise, "noise", name)
        return self._model(
            NoiseParams,
            x_qp=noise.x_qp,
            gap=noise.gap,
            q_diel0=noise.q_diel0,
            epsilon=noise.epsilon,
            temperature=getattr(noise, "temperature", self.temperature),
        )

    def tone_set(self, name: str | None = None) -> ToneSet:
        """The ToneSet named ``name``."""
        tones = self._lookup(self.tone_sets, "tone set", name)
        try:
            return ToneSet(tuple(tuple(t) for t in tones.tones), tuple(tones.demod_freqs), tones.integration)
        except ValueError as e:
            raise DeviceFileError(str(e)) from e

    def observations(self, transmon: str | None = None) -> ObservationSet:
        """Measured frequencies of a transmon.

        Raises:
            DeviceFileError: If the transmon has no measured transitions.
        """
        config = self._lookup(self.transmons, "transmon", transmon)
        measured = config.measured
        if measured is None or not hasattr(measured, "transitions"):
            raise DeviceFileError(f"transmon {config.name!r} has no measured transitions")
        resonator = getattr(measured, "resonator_freqs", None)
        try:
            return ObservationSet(
                tuple((int(i), f) for i, f in measured.transitions),
                None if resonator is None else tuple(resonator),
            )
        except ValueError as e:
            raise DeviceFileError(str(e)) from e

    def coupling_strength(self, a: str, b: str) -> float:
        """J between transmons ``a`` and ``b`` in GHz, in either order.

        Raises:
            DeviceFileError: If no coupling joins them.
        """
        for coupling in self.couplings:
            if {coupling.a, coupling.b} == {a, b}:
                return float(coupling.j)
        raise DeviceFileError(f"no coupling between {a!r} and {b!r}")

    def t1_series(self, transmon: str | None = None) -> T1Series:
        """Measured T1 rows of a transmon.

        Raises:
            DeviceFileError: If the transmon has no measured T1.
        """
        config = self._lookup(self.transmons, "transmon", transmon)
        rows = getattr(config.measured, "t1", None)
        if rows is None:
            raise DeviceFileError(f"transmon {config.name!r} has no measured T1")
        levels, t1, sigma = zip(*rows)
        return T1Series(np.array(levels, dtype=int), np.array(t1, dtype=float), np.array(sigma, dtype=float))
