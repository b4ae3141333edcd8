"""Unit tests for shot-set CSV files and binary manifests."""

import os
import tempfile

import numpy as np
import pytest
from quditkit.errors import DimensionMismatchError, InputError
from quditkit.readout import (
    IQRecord,
    ToneSet,
    read_manifest,
    read_records_csv,
    synthesize_shots,
    write_manifest,
    write_records_csv,
)
from quditkit.readout.io import csv_header, stack_records

TONES = ToneSet(((6.4685, 0.1, 0.0), (6.4675, 0.1, 0.5)), (6.4685, 6.4675), 2.2)


@pytest.fixture
def workdir():
    """Provides a fresh temporary directory."""
    return tempfile.mkdtemp()


def test_csv_header():
    """Tests the interleaved column names."""
    assert csv_header(2) == ["label", "I_1", "Q_1", "I_2", "Q_2"]


def test_records_csv_round_trip(workdir):
    """Tests that labeled and unlabeled records survive a CSV file.

    Args:
        workdir: Temporary directory.
    """
    records = [IQRecord([0.125, -1.5, 3.0, 2e-7], 0), IQRecord([1.0, 2.0, 3.0, 4.0], None)]
    path = os.path.join(workdir, "shots.csv")
    write_records_csv(path, records)
    with open(path) as f:
        assert f.readline() == "label,I_1,Q_1,I_2,Q_2\n"
    restored = read_records_csv(path)
    assert [r.true_label for r in restored] == [0, None]
    np.testing.assert_array_equal(restored[0].values, records[0].values)


def test_write_rejects_mixed_widths(workdir):
    """Tests that records of different widths cannot share a file.

    Args:
        workdir: Temporary directory.
    """
    with pytest.raises(DimensionMismatchError):
        write_records_csv(os.path.join(workdir, "bad.csv"), [IQRecord([1.0, 2.0]), IQRecord([1.0, 2.0, 3.0, 4.0])])
    with pytest.raises(InputError):
        write_records_csv(os.path.join(workdir, "empty.csv"), [])


@pytest.mark.parametrize(
    "content",
    [
        "",
        "state,I_1,Q_1\n0,1,2\n",
        "label,I_1,Q_1\n0,1\n",
        "label,I_1,Q_1\n0,one,2\n",
    ],
)
def test_read_rejects_malformed(workdir, content):
    """Tests that malformed CSV files are input errors.

    Args:
        workdir: Temporary directory.
        content: File content.
    """
    path = os.path.join(workdir, "bad.csv")
    with open(path, "w") as f:
        f.write(content)
    with pytest.raises(InputError):
        read_records_csv(path)


def test_stack_records():
    """Tests stacking records into arrays."""
    values, labels = stack_records([IQRecord([1.0, 2.0], 3), IQRecord([3.0, 4.0], 4)])
    assert values.shape == (2, 2)
    np.testing.assert_array_equal(labels, [3, 4])
    _, labels = stack_records([IQRecord([1.0, 2.0], 3), IQRecord([3.0, 4.0])])
    assert labels is None
    with pytest.raises(DimensionMismatchError):
        stack_records([IQRecord([1.0, 2.0]), IQRecord([1.0, 2.0, 3.0, 4.0])])


def test_manifest_round_trip(workdir):
    """Tests that a manifest restores the shots, tones and seed.

    Args:
        workdir: Temporary directory.
    """
    pulled = [complex(6.468937, -0.000275), complex(6.4687, -0.000275)]
    shots = synthesize_shots([0, 1], TONES, pulled, 0.02, [0.0, 0.05], shots=10, seed=9)
    path = os.path.join(workdir, "shots.manifest")
    write_manifest(path, shots)
    restored = read_manifest(path)
    np.testing.assert_array_equal(restored.values, shots.values)
    np.testing.assert_array_equal(restored.labels, shots.labels)
    np.testing.assert_array_equal(restored.decayed, shots.decayed)
    assert restored.tones == TONES
    assert restored.seed == 9
    assert restored.noise_sigma == 0.02


def test_manifest_without_seed(workdir):
    """Tests that an unseeded shot set round-trips its missing seed.

    Args:
        workdir: Temporary directory.
    """
    pulled = [complex(6.468937, -0.000275)]
    shots = synthesize_shots([0], TONES, pulled, 0.0, [0.0], shots=2)
    path = os.path.join(workdir, "unseeded.manifest")
    write_manifest(path, shots)
    assert read_manifest(path).seed is None


def test_manifest_rejects_truncation(workdir):
    """Tests that a truncated manifest is an input error.

    Args:
        workdir: Temporary directory.
    """
    pulled = [complex(6.468937, -0.000275)]
    shots = synthesize_shots([0], TONES, pulled, 0.0, [0.0], shots=2, seed=1)
    path = os.path.join(workdir, "cut.manifest")
    write_manifest(path, shots)
    with open(path, "rb") as f:
        data = f.read()
    with open(path, "wb") as f:
        f.write(data[:-3])
    with pytest.raises(InputError):
        read_manifest(path)
