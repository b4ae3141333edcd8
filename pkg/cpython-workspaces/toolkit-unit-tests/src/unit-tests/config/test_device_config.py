"""Unit tests for the DeviceConfig class.

The tests load the checked-in device files from a temporary copy, build the
domain objects they describe, and cover settings updates and every way a
device file can be rejected.
"""

import copy
import json
import os
import tempfile

import pytest
from quditkit.config.device import DeviceConfig
from quditkit.errors import DeviceFileError

FILES = os.path.join(os.path.dirname(__file__), "..", "files")


def _read(name: str) -> dict:
    with open(os.path.join(FILES, name), "r") as f:
        return json.loads(f.read())


@pytest.fixture
def cleanup():
    """Sets up a temporary copy of the Q5 device file and removes it afterwards."""
    temp_dir = tempfile.mkdtemp()
    file = os.path.join(temp_dir, "q5.device.json")
    with open(os.path.join(FILES, "q5.device.json"), "r") as src, open(file, "w") as dest:
        dest.write(src.read())

    yield file
    os.remove(file)


def test_settings(cleanup) -> None:
    """Tests the settings block.

    Args:
        cleanup: Fixture providing the path to the temporary device file.
    """
    device = DeviceConfig(cleanup)
    assert device.schema_version == 1
    assert device.cutoff == 40
    assert device.levels == 12
    assert device.seed == 7
    assert device.temperature == 0.01


def test_models(cleanup) -> None:
    """Tests the models built from the Q5 sections.

    Args:
        cleanup: Fixture providing the path to the temporary device file.
    """
    device = DeviceConfig(cleanup)

    model = device.transmon_model("Q5")
    assert model.e_c == 0.099
    assert model.e_j == (32.191,)
    assert model.cutoff == 40
    assert device.transmon_model() == model

    resonator = device.resonator_for("Q5")
    assert resonator.f_r == 6.468937
    assert resonator.kappa == 0.00055
    assert device.resonator_model("R5") == resonator

    noise = device.noise_params()
    assert noise.x_qp == 1e-8
    assert noise.gap == 200.0

    tones = device.tone_set("three-tone")
    assert tones.count == 3
    assert tones.integration == 2.2


def test_measured_data(cleanup) -> None:
    """Tests the measured frequencies and T1 rows.

    Args:
        cleanup: Fixture providing the path to the temporary device file.
    """
    device = DeviceConfig(cleanup)

    observations = device.observations("Q5")
    assert observations.transition_freqs[0] == (0, 4.9472)
    assert len(observations.transition_freqs) == 11
    assert observations.resonator_freqs == (6.468937, 6.468672)

    series = device.t1_series("Q5")
    assert series.levels.tolist() == list(range(1, 10))
    assert series.t1[0] == 64.0
    assert series.uncertainty[-1] == 2.0


def test_update_temporary(cleanup) -> None:
    """Tests that a temporary update leaves the file unchanged.

    Args:
        cleanup: Fixture providing the path to the temporary device file.
    """
    device = DeviceConfig(cleanup)
    device.update_config("cutoff", 60, temporary=True)
    assert device.cutoff == 60
    assert device.transmon_model("Q5").cutoff == 60
    assert _read_file(cleanup)["settings"]["cutoff"] == 40


def test_update_permanent(cleanup) -> None:
    """Tests that a permanent update is persisted.

    Args:
        cleanup: Fixture providing the path to the temporary device file.
    """
    device = DeviceConfig(cleanup)
    device.update_config("seed", 11, temporary=False)
    assert device.seed == 11
    assert _read_file(cleanup)["settings"]["seed"] == 11
    assert DeviceConfig(cleanup).seed == 11


@pytest.mark.parametrize(
    "key,value,error",
    [
        ("cutoff", 0, ValueError),
        ("cutoff", 500, ValueError),
        ("cutoff", "60", TypeError),
        ("seed", True, TypeError),
        ("levels", 1, ValueError),
        ("color", "blue", KeyError),
    ],
)
def test_update_rejects(cleanup, key, value, error) -> None:
    """Tests that invalid settings updates are rejected before anything changes.

    Args:
        cleanup: Fixture providing the path to the temporary device file.
        key: Settings key.
        value: Invalid value.
        error: Expected exception type.
    """
    device = DeviceConfig(cleanup)
    with pytest.raises(error):
        device.update_config(key, value, temporary=False)
    assert _read_file(cleanup)["settings"] == _read("q5.device.json")["settings"]


def _read_file(path: str) -> dict:
    with open(path, "r") as f:
        return json.loads(f.read())


def test_dump_round_trip(cleanup) -> None:
    """Tests that the canonical document reloads to the same configuration.

    Args:
        cleanup: Fixture providing the path to the temporary device file.
    """
    device = DeviceConfig(cleanup)
    path = os.path.join(tempfile.mkdtemp(), "canonical.json")
    device.dump(path)
    assert DeviceConfig(path).to_dict() == device.to_dict()
    with open(path, "r") as f:
        assert f.read().endswith("}\n")


def test_multiple_transmons() -> None:
    """Tests name resolution and couplings in a two-transmon file."""
    device = DeviceConfig(os.path.join(FILES, "chipB.device.json"))
    assert device.coupling_strength("Q2", "Q1") == 0.00159
    assert device.resonator_for("Q2").g == 0.0313
    with pytest.raises(DeviceFileError):
        device.transmon_model()
    with pytest.raises(DeviceFileError):
        device.transmon_model("Q9")
    with pytest.raises(DeviceFileError):
        device.observations("Q1")
    with pytest.raises(DeviceFileError):
        device.t1_series("Q1")
    with pytest.raises(DeviceFileError):
        device.noise_params()


def test_harmonic_models() -> None:
    """Tests that multi-harmonic transmons keep their harmonic signs."""
    device = DeviceConfig(os.path.join(FILES, "q5-harmonics.device.json"))
    model = device.transmon_model("EJ2")
    assert model.e_j == (30.7166, -0.2025)
    assert model.alternating
    assert device.transmon_model("EJ8").harmonics == 8


def test_missing_coupling() -> None:
    """Tests that an absent coupling is reported."""
    device = DeviceConfig.from_dict(_read("q5.device.json"))
    with pytest.raises(DeviceFileError):
        device.coupling_strength("Q5", "Q4")


def test_not_json() -> None:
    """Tests that a non-JSON file is a device-file error."""
    path = os.path.join(tempfile.mkdtemp(), "broken.json")
    with open(path, "w") as f:
        f.write("{not json")
    with pytest.raises(DeviceFileError):
        DeviceConfig(path)


def test_missing_file() -> None:
    """Tests that a missing file raises FileNotFoundError."""
    with pytest.raises(FileNotFoundError):
        DeviceConfig(os.path.join(tempfile.mkdtemp(), "absent.json"))


def _mutations():
    def schema(doc):
        doc["schema_version"] = 2

    def unit(doc):
        doc["units"]["e_c"] = "MHz"

    def unknown_unit(doc):
        doc["units"]["flux"] = "Phi0"

    def missing_e_j(doc):
        del doc["transmons"]["Q5"]["e_j"]

    def bool_harmonic(doc):
        doc["transmons"]["Q5"]["e_j"] = [True]

    def unknown_key(doc):
        doc["transmons"]["Q5"]["flux"] = 0.5

    def dangling_resonator(doc):
        doc["transmons"]["Q5"]["resonator"] = "R9"

    def dangling_coupling(doc):
        doc["couplings"] = [{"a": "Q5", "b": "Q6", "j": 0.001}]

    def short_t1_row(doc):
        doc["transmons"]["Q5"]["measured"]["t1"][0] = [1, 64]

    def two_value_tone(doc):
        doc["tone_sets"]["three-tone"]["tones"][0] = [6.4685, 0.001]

    def negative_kappa(doc):
        doc["resonators"]["R5"]["kappa"] = -0.001

    def bad_setting(doc):
        doc["settings"]["cutoff"] = 1000

    return [
        schema,
        unit,
        unknown_unit,
        missing_e_j,
        bool_harmonic,
        unknown_key,
        dangling_resonator,
        dangling_coupling,
        short_t1_row,
        two_value_tone,
        negative_kappa,
        bad_setting,
    ]


@pytest.mark.parametrize("mutate", _mutations(), ids=lambda f: f.__name__)
def test_invalid_documents(mutate) -> None:
    """Tests that every malformed document is a device-file error.

    Args:
        mutate: Function that breaks one part of the Q5 document.
    """
    doc = copy.deepcopy(_read("q5.device.json"))
    mutate(doc)
    with pytest.raises(DeviceFileError):
        DeviceConfig.from_dict(doc)


def test_invalid_model_values() -> None:
    """Tests that model invariants surface as device-file errors when building models."""
    doc = copy.deepcopy(_read("q5.device.json"))
    doc["transmons"]["Q5"]["e_j"] = [32.191, 0.2]
    doc["transmons"]["Q5"]["alternating"] = True
    doc["tone_sets"]["three-tone"]["demod_freqs"] = [6.4685]
    device = DeviceConfig.from_dict(doc)
    with pytest.raises(DeviceFileError):
        device.transmon_model("Q5")
    with pytest.raises(DeviceFileError):
        device.tone_set()


def test_transmon_without_resonator() -> None:
    """Tests that a transmon with no resonator cannot be read out."""
    doc = copy.deepcopy(_read("q5.device.json"))
    del doc["transmons"]["Q5"]["resonator"]
    with pytest.raises(DeviceFileError):
        DeviceConfig.from_dict(doc).resonator_for("Q5")
