"""This module provides the section classes of a device file. Each section
validates its own keys against a schema, the way the top-level device
configuration validates its settings.

Classes:
    TransmonConfig: Circuit parameters of one transmon and its measured data.
    MeasuredConfig: Measured frequencies and coherence series of one transmon.
    ResonatorConfig: A readout resonator.
    CouplingConfig: A capacitive transmon-transmon coupling.
    NoiseConfig: Quasiparticle and dielectric noise parameters.
    ToneSetConfig: A multi-tone readout drive.
"""

# unit annotations each field must carry in the device file
UNITS = {
    "e_c": "GHz",
    "e_j": "GHz",
    "n_g": "e",
    "f_r": "GHz",
    "g": "GHz",
    "kappa": "GHz",
    "j": "GHz",
    "x_qp": "1",
    "gap": "ueV",
    "q_diel0": "1",
    "epsilon": "1",
    "temperature": "K",
    "tone_frequency": "GHz",
    "tone_amplitude": "GHz",
    "tone_phase": "rad",
    "integration": "us",
    "transitions": "GHz",
    "resonator_freqs": "GHz",
    "t1": "us",
}


def validate_value(schema: dict, key: str, value) -> None:
    """
    Validates a value against the schema entry of ``key``.

    Schema entries may hold ``type``, ``allowed_values``, ``min``/``max`` for
    numbers, ``min_length``/``max_length`` for strings and lists, and
    ``items`` for the element type of lists.

    Raises:
        KeyError: If ``key`` has no schema entry.
        TypeError: If the value is not of the expected type or not allowed.
        ValueError: If the value is out of the allowed range or length.
    """
    if key not in schema:
        raise KeyError(key)
    entry = schema[key]

    if "allowed_values" in entry and value not in entry["allowed_values"]:
        raise TypeError(f"{key}={value!r} is not one of {entry['allowed_values']}")

    # bool is an int subclass and is never a valid number here
    if isinstance(value, bool) and entry["type"] is not bool:
        raise TypeError(f"{key} must be {entry['type']}, got bool")
    if not isinstance(value, entry["type"]):
        raise TypeError(f"{key} must be {entry['type']}, got {type(value).__name__}")

    if isinstance(value, (int, float)):
        if "min" in entry and value < entry["min"]:
            raise ValueError(f"{key}={value} is below {entry['min']}")
        if "max" in entry and value > entry["max"]:
            raise ValueError(f"{key}={value} is above {entry['max']}")
    else:
        if "min_length" in entry and len(value) < entry["min_length"]:
            raise ValueError(f"{key} needs at least {entry['min_length']} entries")
        if "max_length" in entry and len(value) > entry["max_length"]:
            raise ValueError(f"{key} allows at most {entry['max_length']} entries")
        if "items" in entry:
            for item in value:
                if isinstance(item, bool) or not isinstance(item, entry["items"]):
                    raise TypeError(f"{key} entries must be {entry['items']}, got {item!r}")


class _Section:
    """Base class of the schema-validated sections."""

    SCHEMA: dict = {}
    REQUIRED: tuple[str, ...] = ()

    def __init__(self, name: str, section_dict: dict) -> None:
        """
        Validates ``section_dict`` and stores its values as attributes.

        Args:
            name: The section's name in the device file.
            section_dict: The section's JSON object.

        Raises:
            KeyError: If a required key is missing or an unknown key is present.
            TypeError: If a value has the wrong type.
            ValueError: If a value is out of range.
        """
        self.name: str = name
        missing = [key for key in self.REQUIRED if key not in section_dict]
        if missing:
            raise KeyError(f"{type(self).__name__} {name!r} is missing {missing}")
        for key, value in section_dict.items():
            self.validate(key, value)
            setattr(self, key, value)

    def validate(self, key: str, value) -> None:
        """Validates one key of this section; see ``validate_value``."""
        validate_value(self.SCHEMA, key, value)

    def to_dict(self) -> dict:
        """The section's JSON object, schema keys only."""
        return {key: getattr(self, key) for key in self.SCHEMA if hasattr(self, key)}


class MeasuredConfig(_Section):
    """
    Measured data of one transmon.

    Attributes:
        transitions (list): [i, f_{i,i+1}] pairs in GHz.
        resonator_freqs (list): [f_r,|0⟩, f_r,|1⟩] in GHz.
        t1 (list): [level, T1, σ] rows in µs.
    """

    SCHEMA = {
        "transitions": {"type": list, "min_length": 1, "items": list},
        "resonator_freqs": {"type": list, "min_length": 2, "max_length": 2, "items": (int, float)},
        "t1": {"type": list, "min_length": 1, "items": list},
    }

    def validate(self, key: str, value) -> None:
        """Validates one key; pair and row entries are checked element-wise."""
        super().validate(key, value)
        width = {"transitions": 2, "t1": 3}.get(key)
        if width is not None:
            for row in value:
                if len(row) != width or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in row):
                    raise TypeError(f"{key} rows must be {width} numbers, got {row!r}")


class TransmonConfig(_Section):
    """
    Circuit parameters of one transmon.

    Attributes:
        e_c (float): Charging energy in GHz.
        e_j (list[float]): Josephson harmonics in GHz.
        n_g (float): Offset charge.
        alternating (bool): Enforce alternating harmonic signs.
        resonator (str): Name of the readout resonator.
        measured (MeasuredConfig): Optional measured data.
    """

    SCHEMA = {
        "e_c": {"type": (int, float), "min": 1e-6, "max": 100.0},
        "e_j": {"type": list, "min_length": 1, "max_length": 16, "items": (int, float)},
        "n_g": {"type": (int, float), "min": -1.0, "max": 1.0},
        "alternating": {"type": bool},
        "resonator": {"type": str, "min_length": 1},
        "measured": {"type": dict},
    }
    REQUIRED = ("e_c", "e_j")

    def __init__(self, name: str, section_dict: dict) -> None:
        """Validates the transmon and builds its measured-data section."""
        super().__init__(name, section_dict)
        self.measured: MeasuredConfig | None = (
            MeasuredConfig(name, section_dict["measured"]) if "measured" in section_dict else None
        )

    def to_dict(self) -> dict:
        """The transmon's JSON object."""
        data = super().to_dict()
        if self.measured is None:
            data.pop("measured", None)
        else:
            data["measured"] = self.measured.to_dict()
        return data


class ResonatorConfig(_Section):
    """
    A readout resonator.

    Attributes:
        f_r (float): Bare frequency in GHz.
        g (float): Coupling to its transmon in GHz.
        kappa (float): Linewidth in GHz.
        kappa_split (list[float]): Optional (internal, coupling) linewidths in GHz.
    """

    SCHEMA = {
        "f_r": {"type": (int, float), "min": 0.1, "max": 100.0},
        "g": {"type": (int, float), "min": 0.0, "max": 1.0},
        "kappa": {"type": (int, float), "min": 1e-9, "max": 1.0},
        "kappa_split": {"type": list, "min_length": 2, "max_length": 2, "items": (int, float)},
    }
    REQUIRED = ("f_r", "g", "kappa")


class CouplingConfig(_Section):
    """
    A capacitive coupling between two named transmons.

    Attributes:
        a (str): First transmon.
        b (str): Second transmon.
        j (float): Coupling strength in GHz.
    """

    SCHEMA = {
        "a": {"type": str, "min_length": 1},
        "b": {"type": str, "min_length": 1},
        "j": {"type": (int, float), "min": 0.0, "max": 1.0},
    }
    REQUIRED = ("a", "b", "j")


class NoiseConfig(_Section):
    """
    Noise parameters of the relaxation budget.

    Attributes:
        x_qp (float): Normalized quasiparticle density.
        gap (float): Superconducting gap in µeV.
        q_diel0 (float): Dielectric quality factor at 6 GHz.
        epsilon (float): Frequency exponent of the quality factor.
        temperature (float): Bath temperature in K.
    """

    SCHEMA = {
        "x_qp": {"type": (int, float), "min": 0.0, "max": 1.0},
        "gap": {"type": (int, float), "min": 1.0, "max": 2000.0},
        "q_diel0": {"type": (int, float), "min": 1.0, "max": 1e12},
        "epsilon": {"type": (int, float), "min": 1e-6, "max": 10.0},
        "temperature": {"type": (int, float), "min": 1e-6, "max": 10.0},
    }
    REQUIRED = ("x_qp", "gap", "q_diel0", "epsilon")


class ToneSetConfig(_Section):
    """
    A multi-tone readout drive.

    Attributes:
        tones (list): [frequency GHz, amplitude GHz, phase rad] per tone.
        demod_freqs (list[float]): Demodulation frequency per tone in GHz.
        integration (float): Integration time in µs.
    """

    SCHEMA = {
        "tones": {"type": list, "min_length": 1, "max_length": 16, "items": list},
        "demod_freqs": {"type": list, "min_length": 1, "max_length": 16, "items": (int, float)},
        "integration": {"type": (int, float), "min": 1e-3, "max": 1e3},
    }
    REQUIRED = ("tones", "demod_freqs", "integration")

    def validate(self, key: str, value) -> None:
        """Validates one key; each tone must be three numbers."""
        super().validate(key, value)
        if key == "tones":
            for tone in value:
                if len(tone) != 3 or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in tone):
                    raise TypeError(f"tones must be [frequency, amplitude, phase], got {tone!r}")
