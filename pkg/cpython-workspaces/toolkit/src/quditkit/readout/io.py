"""Shot-set persistence.

Two formats are supported:

* CSV, one row per shot: ``label, I_1, Q_1, ..., I_D, Q_D``. An empty label
  marks an unlabeled record.
* A binary manifest written with ``BinaryEncoder`` that also stores the tone
  set, noise width and seed.

**Usage:**
```python
write_records_csv("shots.csv", shot_set.records)
records = read_records_csv("shots.csv")

write_manifest("shots.bin", shot_set)
restored = read_manifest("shots.bin")
```
"""

import csv
from collections.abc import Iterable

import numpy as np

from ..binary_encoder import BinaryDecoder, BinaryEncoder
from ..errors import DimensionMismatchError, InputError
from .simulation import IQRecord, ShotSet, ToneSet

MANIFEST_SCHEMA_VERSION = 1

_MANIFEST_KEYS = (
    "schema_version",
    "tone_freqs",
    "tone_amplitudes",
    "tone_phases",
    "demod_freqs",
    "integration_us",
    "noise_sigma",
    "seed",
    "shots",
    "width",
    "labels",
    "decayed",
    "values",
)


def csv_header(tones: int) -> list[str]:
    """Column names for ``tones`` tones."""
    columns = ["label"]
    for d in range(1, tones + 1):
        columns += [f"I_{d}", f"Q_{d}"]
    return columns


def write_records_csv(path: str, records: Iterable[IQRecord]) -> None:
    """Writes records to ``path``.

    Raises:
        DimensionMismatchError: If records disagree in length.
        InputError: If there are no records.
    """
    records = list(records)
    if not records:
        raise InputError("no records to write")
    width = records[0].values.size
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(csv_header(width // 2))
        for record in records:
            if record.values.size != width:
                raise DimensionMismatchError(f"record of length {record.values.size}, expected {width}")
            label = "" if record.true_label is None else str(record.true_label)
            writer.writerow([label] + [f"{v:.12g}" for v in record.values])


def read_records_csv(path: str) -> list[IQRecord]:
    """Reads records written by ``write_records_csv``.

    Raises:
        InputError: If the header or a row is malformed.
    """
    with open(path, newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration as e:
            raise InputError(f"{path} is empty") from e
        if not header or header[0] != "label" or len(header) % 2 != 1 or header != csv_header(len(header) // 2):
            raise InputError(f"{path} does not have a label, I_1, Q_1, ... header")

        records = []
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise InputError(f"{path}:{line} has {len(row)} columns, expected {len(header)}")
            try:
                label = int(row[0]) if row[0].strip() else None
                values = np.array([float(v) for v in row[1:]])
            except ValueError as e:
                raise InputError(f"{path}:{line} is not numeric") from e
            records.append(IQRecord(values, label))
    return records


def stack_records(records: Iterable[IQRecord]) -> tuple[np.ndarray, np.ndarray | None]:
    """Returns (values, labels) arrays; labels is None if any record is unlabeled.

    Raises:
        DimensionMismatchError: If records disagree in length.
    """
    records = list(records)
    if not records:
        raise InputError("no records")
    width = records[0].values.size
    if any(r.values.size != width for r in records):
        raise DimensionMismatchError("records disagree in length")
    values = np.vstack([r.values for r in records])
    if any(r.true_label is None for r in records):
        return values, None
    return values, np.array([r.true_label for r in records])


def write_manifest(path: str, shot_set: ShotSet) -> None:
    """Writes ``shot_set`` as a binary manifest."""
    tones = shot_set.tones
    encoder = BinaryEncoder()
    encoder.add_int("schema_version", MANIFEST_SCHEMA_VERSION)
    encoder.add_float_array("tone_freqs", tones.frequencies)
    encoder.add_float_array("tone_amplitudes", tones.amplitudes)
    encoder.add_float_array("tone_phases", tones.phases)
    encoder.add_float_array("demod_freqs", tones.demod_freqs)
    encoder.add_float("integration_us", tones.integration, double_precision=True)
    encoder.add_float("noise_sigma", shot_set.noise_sigma, double_precision=True)
    encoder.add_int("seed", -1 if shot_set.seed is None else shot_set.seed, size=8)
    encoder.add_int("shots", shot_set.values.shape[0], size=4)
    encoder.add_int("width", shot_set.values.shape[1], size=4)
    encoder.add_int_array("labels", shot_set.labels)
    encoder.add_int_array("decayed", shot_set.decayed.astype(np.int64))
    encoder.add_float_array("values", shot_set.values.ravel())
    with open(path, "wb") as f:
        f.write(encoder.to_bytes())


def read_manifest(path: str) -> ShotSet:
    """Reads a manifest written by ``write_manifest``.

    Raises:
        InputError: If the file is truncated, of another schema version, or incomplete.
    """
    with open(path, "rb") as f:
        data = f.read()
    try:
        decoder = BinaryDecoder(data, keys=_MANIFEST_KEYS)
    except ValueError as e:
        raise InputError(f"{path} is not a valid manifest: {e}") from e

    version = decoder.get_int("schema_version")
    if version != MANIFEST_SCHEMA_VERSION:
        raise InputError(f"{path} has manifest schema version {version}, expected {MANIFEST_SCHEMA_VERSION}")
    missing = [key for key in _MANIFEST_KEYS if key not in decoder.get_all()]
    if missing:
        raise InputError(f"{path} is missing {missing}")

    tones = ToneSet(
        tuple(
            zip(
                decoder.get_float_array("tone_freqs"),
                decoder.get_float_array("tone_amplitudes"),
                decoder.get_float_array("tone_phases"),
            )
        ),
        tuple(decoder.get_float_array("demod_freqs")),
        decoder.get_float("integration_us"),
    )
    shots, width = decoder.get_int("shots"), decoder.get_int("width")
    seed = decoder.get_int("seed")
    return ShotSet(
        values=decoder.get_float_array("values").reshape(shots, width),
        labels=decoder.get_int_array("labels"),
        decayed=decoder.get_int_array("decayed").astype(bool),
        tones=tones,
        noise_sigma=decoder.get_float("noise_sigma"),
        seed=None if seed == -1 else seed,
    )
