"""Unit tests for the exponential and randomized-benchmarking fits."""

import math

import numpy as np
import pytest
from quditkit.analysis import (
    coherence_limited_error,
    error_per_clifford,
    fit_exponential,
    fit_rb,
    process_infidelity,
    pure_dephasing_time,
)
from quditkit.errors import FitError, InputError

DEPTHS = np.array([1, 2, 4, 8, 16, 32, 64, 128, 256, 512])


def _rb_survival(r: float, randomizations: int, shots: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    ideal = 0.5 * r**DEPTHS + 0.5
    spread = np.clip(ideal + rng.normal(0.0, 0.005, (randomizations, DEPTHS.size)), 0.0, 1.0)
    return rng.binomial(shots, spread) / shots


def test_fit_exponential_recovers_t1():
    """Tests recovery of A, T and C from a noiseless decay."""
    times = np.linspace(0.0, 300.0, 31)
    fit = fit_exponential(times, 0.95 * np.exp(-times / 64.0) + 0.02)
    assert fit.model == "exponential"
    assert fit.decay == pytest.approx(64.0, rel=1e-6)
    assert fit.amplitude == pytest.approx(0.95, rel=1e-6)
    assert fit.offset == pytest.approx(0.02, abs=1e-6)
    assert fit.rms_residual < 1e-8


def test_fit_exponential_with_noise():
    """Tests that a noisy decay is fitted within its standard error."""
    rng = np.random.default_rng(4)
    times = np.linspace(0.0, 200.0, 41)
    values = np.exp(-times / 34.0) + rng.normal(0.0, 0.01, times.size)
    fit = fit_exponential(times, values)
    assert abs(fit.decay - 34.0) < 4 * fit.decay_stderr
    assert set(fit.to_dict()) == {"model", "amplitude", "decay", "offset", "stderr", "rms_residual"}


@pytest.mark.parametrize(
    "times,values",
    [
        ([0.0, 1.0, 2.0], [1.0, 0.5, 0.25]),
        ([0.0, 2.0, 1.0, 3.0], [1.0, 0.5, 0.25, 0.1]),
        ([0.0, 1.0, 2.0, 3.0], [1.0, 0.5, math.nan, 0.1]),
        ([0.0, 1.0, 2.0, 3.0], [1.0, 0.5]),
    ],
)
def test_fit_exponential_rejects(times, values):
    """Tests short, unsorted, non-finite and mismatched series.

    Args:
        times: Abscissae.
        values: Data.
    """
    with pytest.raises(InputError):
        fit_exponential(times, values)


def test_flat_data_do_not_decay():
    """Tests that a constant series is a fit error."""
    with pytest.raises(FitError):
        fit_exponential([0.0, 1.0, 2.0, 3.0, 4.0], [0.5] * 5)


def test_fit_rb_recovers_decay():
    """Tests RB recovery within three standard errors from 30 randomizations of 1000 shots."""
    fit, e_f = fit_rb(DEPTHS, _rb_survival(0.995, 30, 1000, seed=2), d_subspace=2)
    assert fit.model == "rb"
    assert abs(fit.decay - 0.995) < 3 * fit.decay_stderr
    assert e_f == pytest.approx(process_infidelity(fit.decay, 2))
    assert fit.offset == pytest.approx(0.5, abs=0.05)


def test_fit_rb_single_series():
    """Tests the unweighted fit of one averaged survival curve."""
    survival = (1.0 / 3.0) + (2.0 / 3.0) * 0.98**DEPTHS
    fit, e_f = fit_rb(DEPTHS, survival, d_subspace=3)
    assert fit.decay == pytest.approx(0.98, rel=1e-6)
    assert e_f == pytest.approx(0.02 * (1 - 1 / 9), rel=1e-5)


def test_fit_rb_rejects_subspace():
    """Tests that a one-dimensional subspace is rejected."""
    with pytest.raises(InputError):
        fit_rb(DEPTHS, 0.5 + 0.5 * 0.99**DEPTHS, d_subspace=1)


def test_error_conversions():
    """Tests the RB error conversions."""
    assert process_infidelity(0.99, 2) == pytest.approx(0.0075)
    assert error_per_clifford(0.99, 2) == pytest.approx(0.005)
    assert process_infidelity(1.0, 5) == 0.0


def test_coherence_limits():
    """Tests the coherence-limited gate error and the pure dephasing time."""
    assert coherence_limited_error(0.0, 64.0, 40.0) == 0.0
    small = coherence_limited_error(0.05, 64.0, 40.0)
    assert small == pytest.approx(0.05 / 6 * (1 / 64.0 + 2 / 40.0), rel=1e-3)
    assert pure_dephasing_time(50.0, 40.0) == pytest.approx(1 / (1 / 40.0 - 1 / 100.0))
    assert pure_dephasing_time(100.0, 200.0) == math.inf
    with pytest.raises(InputError):
        coherence_limited_error(0.05, 0.0, 40.0)
    with pytest.raises(InputError):
        pure_dephasing_time(-1.0, 40.0)
