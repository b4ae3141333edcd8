"""Experiment analysis: decay and RB fits, Ramsey beating, and state tomography."""

from .decay import (
    DecayFit,
    coherence_limited_error,
    error_per_clifford,
    fit_exponential,
    fit_rb,
    process_infidelity,
    pure_dephasing_time,
)
from .populations import normalized_population
from .ramsey import RamseyBeatFit, extract_delta_f, fit_ramsey_beat
from .tomography import (
    DensityMatrix,
    GateRotation,
    GateSequence,
    ideal_probabilities,
    reconstruct_state,
    simulate_tomography,
    state_fidelity,
    subspace_unitary,
    tomography_gate_set,
)

__all__ = [
    "DecayFit",
    "DensityMatrix",
    "GateRotation",
    "GateSequence",
    "RamseyBeatFit",
    "coherence_limited_error",
    "error_per_clifford",
    "extract_delta_f",
    "fit_exponential",
    "fit_ramsey_beat",
    "fit_rb",
    "ideal_probabilities",
    "normalized_population",
    "process_infidelity",
    "pure_dephasing_time",
    "reconstruct_state",
    "simulate_tomography",
    "state_fidelity",
    "subspace_unitary",
    "tomography_gate_set",
]
