"""Unit tests for qudit state tomography."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from quditkit.analysis import (
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
from quditkit.errors import DimensionMismatchError, InputError


def _zero_eight(d: int = 9) -> np.ndarray:
    psi = np.zeros(d, dtype=complex)
    psi[0] = psi[8] = 1 / np.sqrt(2)
    return psi


@pytest.mark.parametrize("d,size", [(2, 3), (3, 7), (4, 13), (9, 73)])
def test_gate_set_size(d, size):
    """Tests that the gate set holds 1 + d(d-1) sequences.

    Args:
        d: Qudit dimension.
        size: Expected number of sequences.
    """
    gates = tomography_gate_set(d)
    assert len(gates) == size
    assert gates[0].to_mnemonic() == "I"
    assert len({g.to_mnemonic() for g in gates}) == size


def test_gate_set_rejects_qubitless():
    """Tests that a single level has no tomography."""
    with pytest.raises(InputError):
        tomography_gate_set(1)


def test_subspace_unitary():
    """Tests the X and Y π rotations and their embedding."""
    x = subspace_unitary(3, 1, "X", np.pi)
    np.testing.assert_allclose(x @ [0, 1, 0], [0, 0, -1j], atol=1e-15)
    y = subspace_unitary(3, 0, "Y", np.pi)
    np.testing.assert_allclose(y @ [1, 0, 0], [0, 1, 0], atol=1e-15)
    assert x[0, 0] == 1
    with pytest.raises(InputError):
        subspace_unitary(3, 2, "X", np.pi)
    with pytest.raises(InputError):
        subspace_unitary(3, 0, "Z", np.pi)


def test_sequence_order():
    """Tests that the right-most rotation is applied first."""
    sequence = GateSequence((GateRotation(1, "X", 180.0), GateRotation(0, "X", 180.0)))
    final = sequence.unitary(3) @ np.array([1, 0, 0], dtype=complex)
    assert abs(final[2]) == pytest.approx(1.0)


def test_mnemonics():
    """Tests the mnemonic round trip, including two-digit levels."""
    for gate in tomography_gate_set(12):
        assert GateSequence.from_mnemonic(gate.to_mnemonic()) == gate
    assert GateRotation(9, "X", 180.0).to_mnemonic() == "X9-10:180"
    assert GateRotation(0, "Y", 90.0).to_mnemonic() == "Y01:90"


@pytest.mark.parametrize("text", ["Z01:90", "X02:90", "X01", "X01:90;;Y12:90", "X3-5:180"])
def test_malformed_mnemonics(text):
    """Tests that malformed or non-neighboring tokens are rejected.

    Args:
        text: Sequence mnemonic.
    """
    with pytest.raises(InputError):
        GateSequence.from_mnemonic(text)


@pytest.mark.parametrize(
    "matrix",
    [
        np.ones((2, 3)) / 2,
        np.array([[0.5, 0.1], [0.2, 0.5]]),
        np.eye(2),
        np.array([[1.2, 0.0], [0.0, -0.2]]),
    ],
)
def test_density_matrix_rejects(matrix):
    """Tests non-square, non-Hermitian, non-unit-trace and negative matrices.

    Args:
        matrix: Candidate density matrix.
    """
    with pytest.raises(InputError):
        DensityMatrix(matrix)


def test_pure_state():
    """Tests the pure-state constructor and purity."""
    rho = DensityMatrix.pure([1, 1j])
    assert rho.purity == pytest.approx(1.0)
    assert rho.dimension == 2
    assert rho.to_dict()["imag"][1][0] == pytest.approx(0.5)
    with pytest.raises(InputError):
        DensityMatrix.pure([0, 0])


def test_ideal_reconstruction():
    """Tests exact recovery of a d = 9 superposition from ideal probabilities."""
    psi = _zero_eight()
    gates = tomography_gate_set(9)
    probabilities = ideal_probabilities(DensityMatrix.pure(psi), gates)
    np.testing.assert_allclose(probabilities.sum(axis=1), 1.0)
    estimate = reconstruct_state(probabilities, gates)
    assert state_fidelity(estimate, psi) > 0.9999


@settings(max_examples=20, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False), min_size=3, max_size=3))
def test_reconstruction_of_random_qutrits(amplitudes):
    """Tests that ideal data reconstruct any pure qutrit state.

    Args:
        amplitudes: Unnormalized amplitudes.
    """
    psi = np.array(amplitudes)
    if np.linalg.norm(psi) < 1e-3:
        return
    gates = tomography_gate_set(3)
    estimate = reconstruct_state(ideal_probabilities(DensityMatrix.pure(psi), gates), gates)
    assert state_fidelity(estimate, psi) == pytest.approx(1.0, abs=1e-8)


def test_sampled_reconstruction():
    """Tests the median fidelity with 5000 shots per sequence."""
    psi = _zero_eight()
    rho = DensityMatrix.pure(psi)
    gates = tomography_gate_set(9)
    fidelities = [
        state_fidelity(reconstruct_state(simulate_tomography(rho, gates, 5000, seed=seed), gates), psi)
        for seed in range(11)
    ]
    assert np.median(fidelities) > 0.99


def test_simulated_frequencies():
    """Tests that sampled frequencies are normalized and seeded."""
    rho = DensityMatrix.pure([1, 0, 1])
    gates = tomography_gate_set(3)
    first = simulate_tomography(rho, gates, 100, seed=3)
    np.testing.assert_allclose(first.sum(axis=1), 1.0)
    np.testing.assert_array_equal(first, simulate_tomography(rho, gates, 100, seed=3))
    with pytest.raises(InputError):
        simulate_tomography(rho, gates, 0)


def test_incomplete_gate_set():
    """Tests that undetermined elements are named."""
    gates = tomography_gate_set(3)[:3]
    with pytest.raises(InputError, match=r"rho\[0,2\]"):
        reconstruct_state(np.full((3, 3), 1 / 3), gates)


def test_reconstruction_shapes():
    """Tests mismatched probability tables and target dimensions."""
    gates = tomography_gate_set(3)
    with pytest.raises(DimensionMismatchError):
        reconstruct_state(np.full((6, 3), 1 / 3), gates)
    rho = reconstruct_state(ideal_probabilities(DensityMatrix.pure([1, 0, 0]), gates), gates)
    with pytest.raises(DimensionMismatchError):
        state_fidelity(rho, [1, 0])
