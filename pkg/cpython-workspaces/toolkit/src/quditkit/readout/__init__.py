"""Multi-tone readout simulation and shot-set files."""

from .io import read_manifest, read_records_csv, write_manifest, write_records_csv
from .simulation import (
    IQRecord,
    ShotSet,
    ToneSet,
    group_tone_frequencies,
    integrated_iq,
    state_pulled_frequency,
    synthesize_shots,
    trajectory,
)

__all__ = [
    "IQRecord",
    "ShotSet",
    "ToneSet",
    "group_tone_frequencies",
    "integrated_iq",
    "read_manifest",
    "read_records_csv",
    "state_pulled_frequency",
    "synthesize_shots",
    "trajectory",
    "write_manifest",
    "write_records_csv",
]
