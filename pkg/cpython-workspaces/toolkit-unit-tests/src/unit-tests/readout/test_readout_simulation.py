"""Unit tests for the semi-classical multi-tone readout simulation.

The drive is the three-tone Q5 configuration: tones near the pulled
resonator frequencies of the low, middle and high states, 2.2 µs long.
"""

import warnings

import numpy as np
import pytest
from quditkit.dispersive import ResonatorModel, stark_and_lamb
from quditkit.errors import ApproximationValidityWarning, DimensionMismatchError, InputError
from quditkit.hamiltonian import TransmonModel, eigensolve
from quditkit.readout import (
    IQRecord,
    ToneSet,
    group_tone_frequencies,
    integrated_iq,
    state_pulled_frequency,
    synthesize_shots,
    trajectory,
)
from quditkit.readout.simulation import integrated_amplitude
from scipy.integrate import simpson

R5 = ResonatorModel(f_r=6.468937, g=0.0281, kappa=0.00055)
TONES = ToneSet(
    tones=((6.4685, 0.1, 0.0), (6.4675, 0.1, 0.0), (6.4665, 0.075, 0.0)),
    demod_freqs=(6.4685, 6.4675, 6.4665),
    integration=2.2,
)
# measured T1 in µs for levels 1..9
T1_US = (64, 34, 24, 21, 17, 14, 13, 14, 13)


@pytest.fixture(scope="module")
def pulled():
    """Provides the complex pulled resonator frequency of Q5 states 0..9."""
    model = TransmonModel(e_c=0.099, e_j=(32.191,))
    report = stark_and_lamb(eigensolve(model, 12), R5, 10)
    return [state_pulled_frequency(R5, report, j) for j in range(10)]


@pytest.mark.parametrize(
    "tones,demod,integration",
    [
        ((), (), 2.2),
        (((6.4, 0.1),), (6.4,), 2.2),
        (((6.4, 0.1, 0.0),), (6.4, 6.5), 2.2),
        (((6.4, 0.1, 0.0),), (6.4,), 0.0),
    ],
)
def test_invalid_tone_sets(tones, demod, integration):
    """Tests that malformed tone sets are rejected.

    Args:
        tones: Tone triples.
        demod: Demodulation frequencies.
        integration: Integration time in µs.
    """
    with pytest.raises(InputError):
        ToneSet(tones, demod, integration)


def test_tone_set_accessors():
    """Tests the tone set's derived arrays and copies."""
    assert TONES.count == 3
    np.testing.assert_array_equal(TONES.amplitudes, [0.1, 0.1, 0.075])
    assert TONES.with_integration(1.0).integration == 1.0
    assert TONES.to_dict()["demod_freqs"] == [6.4685, 6.4675, 6.4665]


def test_iq_record_layout():
    """Tests that IQ vectors must interleave whole tones."""
    assert IQRecord(np.zeros(6), 2).tones == 3
    with pytest.raises(DimensionMismatchError):
        IQRecord(np.zeros(5))


def test_pulled_frequency(pulled):
    """Tests that states pull the resonator downwards with a -κ/2 imaginary part.

    Args:
        pulled: Complex pulled frequencies.
    """
    assert pulled[0].imag == pytest.approx(-0.5 * R5.kappa)
    assert pulled[1].real < pulled[0].real
    with pytest.raises(IndexError):
        state_pulled_frequency(R5, stark_and_lamb(eigensolve(TransmonModel(0.099, (32.191,)), 12), R5, 2), 2)


@pytest.mark.parametrize("state", [0, 4, 9])
@pytest.mark.parametrize("m", [0, 1, 2])
def test_closed_form_matches_quadrature(pulled, state, m):
    """Tests the closed-form Ā(T) against quadrature of A(t).

    Args:
        pulled: Complex pulled frequencies.
        state: Transmon state.
        m: Demodulation index.
    """
    t_us = np.linspace(0.0, TONES.integration, 20001)
    samples = trajectory(pulled[state], TONES, m, t_us)
    t_ns = 1e3 * t_us
    numeric = simpson(samples.real, x=t_ns) + 1j * simpson(samples.imag, x=t_ns)
    closed = integrated_amplitude(pulled[state], TONES, m)
    assert abs(closed - numeric) <= 1e-6 * abs(closed)


def test_trajectory_starts_from_initial_value(pulled):
    """Tests that a trajectory restarted mid-way continues the original one.

    Args:
        pulled: Complex pulled frequencies.
    """
    grid = np.linspace(0.5, 2.2, 50)
    full = trajectory(pulled[3], TONES, 1, grid)
    a_half = trajectory(pulled[3], TONES, 1, [0.5])[0]
    restarted = trajectory(pulled[3], TONES, 1, grid, a0=a_half, t0=0.5)
    np.testing.assert_allclose(restarted, full, rtol=1e-9, atol=1e-12)
    assert trajectory(pulled[3], TONES, 1, [0.0])[0] == 0.0


def test_trajectory_rejects_bad_grid(pulled):
    """Tests that descending grids and grids before t0 are rejected.

    Args:
        pulled: Complex pulled frequencies.
    """
    with pytest.raises(InputError):
        trajectory(pulled[0], TONES, 0, [1.0, 0.5])
    with pytest.raises(InputError):
        trajectory(pulled[0], TONES, 0, [0.1], t0=0.5)
    with pytest.raises(IndexError):
        trajectory(pulled[0], TONES, 3, [0.1])


def _scaled(tones: ToneSet, factors) -> ToneSet:
    return ToneSet(
        tuple((f, amplitude * k, phase) for (f, amplitude, phase), k in zip(tones.tones, factors)),
        tones.demod_freqs,
        tones.integration,
    )


def test_response_is_linear_in_drive(pulled):
    """Tests that scaling every drive amplitude scales A(t) and Ā(T) alike.

    Args:
        pulled: Complex pulled frequencies.
    """
    grid = np.linspace(0.0, 2.2, 40)
    louder = _scaled(TONES, (3.0, 3.0, 3.0))
    for m in range(3):
        np.testing.assert_allclose(
            trajectory(pulled[2], louder, m, grid), 3.0 * trajectory(pulled[2], TONES, m, grid), rtol=1e-10, atol=1e-12
        )
    np.testing.assert_allclose(integrated_iq(pulled[2], louder), 3.0 * integrated_iq(pulled[2], TONES), rtol=1e-10)


def test_response_superposes_over_tones(pulled):
    """Tests that the multi-tone response is the sum of single-tone responses.

    Args:
        pulled: Complex pulled frequencies.
    """
    grid = np.linspace(0.0, 2.2, 40)
    singles = [_scaled(TONES, np.eye(3)[d]) for d in range(3)]
    for m in range(3):
        summed = sum(trajectory(pulled[5], single, m, grid) for single in singles)
        np.testing.assert_allclose(summed, trajectory(pulled[5], TONES, m, grid), rtol=1e-10, atol=1e-12)
    summed_iq = sum(integrated_iq(pulled[5], single) for single in singles)
    np.testing.assert_allclose(summed_iq, integrated_iq(pulled[5], TONES), rtol=1e-10)


def test_free_decay_without_drive(pulled):
    """Tests that an undriven resonator rings down at κ/2 from its initial amplitude.

    Args:
        pulled: Complex pulled frequencies.
    """
    silent = _scaled(TONES, (0.0, 0.0, 0.0))
    grid = np.linspace(0.3, 2.2, 30)
    ringdown = trajectory(pulled[1], silent, 0, grid, a0=1.0 + 0.5j, t0=0.3)
    t_ns = 1e3 * (grid - 0.3)
    expected = (1.0 + 0.5j) * np.exp(-2j * np.pi * (pulled[1] - TONES.demod_freqs[0]) * t_ns)
    np.testing.assert_allclose(ringdown, expected, rtol=1e-9)
    np.testing.assert_allclose(np.abs(ringdown), abs(1.0 + 0.5j) * np.exp(-np.pi * R5.kappa * t_ns), rtol=1e-9)
    assert np.all(trajectory(pulled[1], silent, 0, grid) == 0.0)


def test_noiseless_shots(pulled):
    """Tests that shots without noise or decay are the clean integrated values.

    Args:
        pulled: Complex pulled frequencies.
    """
    shots = synthesize_shots([0, 5], TONES, pulled, 0.0, [0.0] * 10, shots=3, seed=1)
    assert shots.values.shape == (6, 6)
    np.testing.assert_array_equal(shots.labels, [0, 0, 0, 5, 5, 5])
    clean = integrated_iq(pulled[5], TONES)
    np.testing.assert_allclose(shots.values[3, 0::2], clean.real)
    np.testing.assert_allclose(shots.values[3, 1::2], clean.imag)
    assert not shots.decayed.any()
    assert [r.true_label for r in shots.records] == [0, 0, 0, 5, 5, 5]


def test_decayed_fraction(pulled):
    """Tests that the decayed fraction follows 1 - exp(-T/T1).

    Args:
        pulled: Complex pulled frequencies.
    """
    gamma1 = [0.0] + [1.0 / t1 for t1 in T1_US]
    shots = synthesize_shots([1, 9], TONES, pulled, 0.01, gamma1, shots=5000, seed=11)
    fractions = shots.decayed_fraction()
    assert fractions[9] == pytest.approx(0.16, abs=0.02)
    assert fractions[1] == pytest.approx(1 - np.exp(-2.2 / 64), abs=0.01)


def test_decayed_shot_lies_between_states(pulled):
    """Tests that a decayed record differs from the clean record of its state.

    Args:
        pulled: Complex pulled frequencies.
    """
    gamma1 = [0.0, 5.0] + [0.0] * 8
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        shots = synthesize_shots([1], TONES, pulled, 0.0, gamma1, shots=50, seed=2)
    clean = integrated_iq(pulled[1], TONES)
    decayed_row = shots.values[shots.decayed][0]
    assert not np.allclose(decayed_row[0::2], clean.real)


def test_seeded_shots_repeat(pulled):
    """Tests that the same seed gives identical shots.

    Args:
        pulled: Complex pulled frequencies.
    """
    gamma1 = [0.0] + [1.0 / t1 for t1 in T1_US]
    first = synthesize_shots(range(10), TONES, pulled, 0.05, gamma1, shots=20, seed=4)
    second = synthesize_shots(range(10), TONES, pulled, 0.05, gamma1, shots=20, seed=4)
    np.testing.assert_array_equal(first.values, second.values)


def test_stretched_decay_warns(pulled):
    """Tests that Γ1·T above the validity limit warns.

    Args:
        pulled: Complex pulled frequencies.
    """
    gamma1 = [0.0, 1.0] + [0.0] * 8
    with pytest.warns(ApproximationValidityWarning):
        synthesize_shots([1], TONES, pulled, 0.0, gamma1, shots=2, seed=0)


@pytest.mark.parametrize(
    "states,sigma,gamma1",
    [
        ([0], -0.1, [0.0, 0.0]),
        ([0], 0.1, [0.1, 0.0]),
        ([5], 0.1, [0.0, 0.0]),
        ([1], 0.1, [0.0, -0.1]),
    ],
)
def test_synthesize_rejects_inputs(pulled, states, sigma, gamma1):
    """Tests that invalid noise, rates and states are rejected.

    Args:
        pulled: Complex pulled frequencies.
        states: Prepared states.
        sigma: Noise width.
        gamma1: Decay rates.
    """
    with pytest.raises(InputError):
        synthesize_shots(states, TONES, pulled, sigma, gamma1, shots=2)


def test_group_tone_frequencies(pulled):
    """Tests that each tone sits at the mean pull of its group.

    Args:
        pulled: Complex pulled frequencies.
    """
    freqs = group_tone_frequencies(pulled, [[0, 1, 2, 3], [3, 4, 5, 6], [6, 7, 8, 9]])
    assert len(freqs) == 3
    assert freqs[0] > freqs[1] > freqs[2]
    assert freqs[0] == pytest.approx(np.mean([p.real for p in pulled[:4]]))
    with pytest.raises(InputError):
        group_tone_frequencies(pulled, [[]])
