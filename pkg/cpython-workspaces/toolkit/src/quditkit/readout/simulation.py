"""Semi-classical multi-tone dispersive readout.

With the transmon in |j⟩ the resonator has the complex frequency
p_j = f_r + χ_j - iκ/2 (ordinary frequency, GHz). In a frame rotating at the
demodulation frequency f_m the mean-field amplitude obeys

    dA/dt = -i(ω̄ - ω_m)A - Σ_d i(Ω_d/2)·exp(-i(ω_d - ω_m)t - iφ_d)

with ω = 2πf. Its closed-form solution from (t0, A0) is

    A(t) = Σ_d P_d(t) + [A0 - Σ_d P_d(t0)]·exp(-iλ(t - t0))
    P_d(t) = -(Ω_d/2)·exp(-iφ_d)·exp(-iν_d t)/(ω̄ - ω_d)

with λ = ω̄ - ω_m and ν_d = ω_d - ω_m. The time integral has a closed form
too, so integrated IQ values never need quadrature. Times are µs at the API
and ns internally; records hold Ā(T)/T and are dimensionless.
"""

import math
import warnings
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..dispersive import DispersiveReport, ResonatorModel
from ..errors import ApproximationValidityWarning, DimensionMismatchError, InputError
from ..units import NS_PER_US, TWO_PI

DECAY_VALIDITY = 0.3
_SMALL_PHASE = 1e-8


@dataclass(frozen=True)
class ToneSet:
    """A multi-tone readout drive.

    Attributes:
        tones: (f_d GHz, Ω_d/2π GHz, φ_d rad) per tone.
        demod_freqs: Demodulation frequency f_m in GHz, one per tone.
        integration: Integration time T in µs.
    """

    tones: tuple[tuple[float, float, float], ...]
    demod_freqs: tuple[float, ...]
    integration: float

    def __post_init__(self) -> None:
        """Normalizes to float tuples and checks invariants.

        Raises:
            InputError: If the tone set is empty, misaligned or has a non-positive T.
        """
        tones = tuple(tuple(float(x) for x in tone) for tone in self.tones)
        demod = tuple(float(f) for f in self.demod_freqs)
        if not tones:
            raise InputError("a tone set needs at least one tone")
        if any(len(tone) != 3 for tone in tones):
            raise InputError("each tone is (frequency, amplitude, phase)")
        if len(demod) != len(tones):
            raise InputError(f"{len(demod)} demodulation frequencies for {len(tones)} tones")
        if not self.integration > 0:
            raise InputError(f"integration time must be positive, got {self.integration}")
        object.__setattr__(self, "tones", tones)
        object.__setattr__(self, "demod_freqs", demod)
        object.__setattr__(self, "integration", float(self.integration))

    @property
    def count(self) -> int:
        """Number of tones D."""
        return len(self.tones)

    @property
    def frequencies(self) -> np.ndarray:
        """Drive frequencies in GHz."""
        return np.array([tone[0] for tone in self.tones])

    @property
    def amplitudes(self) -> np.ndarray:
        """Drive amplitudes Ω_d/2π in GHz."""
        return np.array([tone[1] for tone in self.tones])

    @property
    def phases(self) -> np.ndarray:
        """Drive phases in rad."""
        return np.array([tone[2] for tone in self.tones])

    def with_integration(self, integration: float) -> "ToneSet":
        """Returns a copy with a different integration time."""
        return ToneSet(self.tones, self.demod_freqs, integration)

    def to_dict(self) -> dict:
        """Plain-dict form for reports and device files."""
        return {
            "tones": [list(tone) for tone in self.tones],
            "demod_freqs": list(self.demod_freqs),
            "integration": self.integration,
        }


@dataclass(frozen=True)
class IQRecord:
    """Integrated quadratures (I_1, Q_1, ..., I_D, Q_D) of one shot."""

    values: np.ndarray
    true_label: int | None = None

    def __post_init__(self) -> None:
        """Checks the interleaved layout.

        Raises:
            DimensionMismatchError: If the vector length is odd or zero.
        """
        values = np.asarray(self.values, dtype=float).ravel()
        if values.size == 0 or values.size % 2:
            raise DimensionMismatchError(f"IQ vector length must be even and positive, got {values.size}")
        object.__setattr__(self, "values", values)

    @property
    def tones(self) -> int:
        """Number of tones D."""
        return self.values.size // 2


def iq_vector(amplitudes) -> np.ndarray:
    """Interleaves complex per-tone values into (I_1, Q_1, ..., I_D, Q_D)."""
    amplitudes = np.asarray(amplitudes, dtype=complex)
    out = np.empty(amplitudes.shape[:-1] + (2 * amplitudes.shape[-1],))
    out[..., 0::2] = amplitudes.real
    out[..., 1::2] = amplitudes.imag
    return out


def state_pulled_frequency(res: ResonatorModel, chi: DispersiveReport, j: int) -> complex:
    """Complex resonator frequency f_r + χ_j - iκ/2 in GHz with the transmon in |j⟩.

    Raises:
        IndexError: If ``j`` is not in the dispersive table.
    """
    if not 0 <= j < len(chi.chi):
        raise IndexError(f"state {j} outside the {len(chi.chi)} tabulated levels")
    return complex(res.f_r + chi.chi[j], -0.5 * res.kappa)


def _drive_terms(pulled: complex, tones: ToneSet, m: int) -> tuple[np.ndarray, np.ndarray, complex]:
    """Returns (C_d, ν_d, λ) in rad/ns for demodulation index ``m``.

    P_d(t) = C_d·exp(-iν_d t) with t in ns.
    """
    omega_bar = TWO_PI * pulled
    omega_m = TWO_PI * tones.demod_freqs[m]
    omega_d = TWO_PI * tones.frequencies
    half_rabi = 0.5 * TWO_PI * tones.amplitudes
    coefficients = -half_rabi * np.exp(-1j * tones.phases) / (omega_bar - omega_d)
    return coefficients, omega_d - omega_m, omega_bar - omega_m


def _check_demod(tones: ToneSet, m: int) -> None:
    if not 0 <= m < tones.count:
        raise IndexError(f"demodulation index {m} outside {tones.count} tones")


def _trajectory_ns(pulled, tones, m, t_ns, t0_ns, a0):
    coefficients, nu, lam = _drive_terms(pulled, tones, m)
    t_ns = np.asarray(t_ns, dtype=float)
    t0_ns = np.asarray(t0_ns, dtype=float)
    particular = np.exp(-1j * np.multiply.outer(t_ns, nu)) @ coefficients
    particular0 = np.exp(-1j * np.multiply.outer(t0_ns, nu)) @ coefficients
    return particular + (a0 - particular0) * np.exp(-1j * lam * (t_ns - t0_ns))


def _integral_ns(pulled, tones, m, t0_ns, t1_ns, a0):
    """∫_{t0}^{t1} A(t) dt in ns, broadcasting over t0, t1 and a0."""
    coefficients, nu, lam = _drive_terms(pulled, tones, m)
    t0_ns = np.asarray(t0_ns, dtype=float)
    t1_ns = np.asarray(t1_ns, dtype=float)
    span = t1_ns - t0_ns

    phase0 = np.exp(-1j * np.multiply.outer(t0_ns, nu))
    phase1 = np.exp(-1j * np.multiply.outer(t1_ns, nu))
    nu_span = np.multiply.outer(span, nu)
    small = np.abs(nu_span) < _SMALL_PHASE
    safe_nu = np.where(nu == 0, 1.0, nu)
    drive_integrals = np.where(small, np.multiply.outer(span, np.ones_like(nu)) * phase0, (phase0 - phase1) / (1j * safe_nu))
    particular = drive_integrals @ coefficients

    particular0 = phase0 @ coefficients
    homogeneous = (a0 - particular0) * (1.0 - np.exp(-1j * lam * span)) / (1j * lam)
    return particular + homogeneous


def trajectory(
    pulled: complex,
    tones: ToneSet,
    m: int,
    t_grid,
    a0: complex = 0.0,
    t0: float = 0.0,
) -> np.ndarray:
    """Mean-field amplitude A(t) in the frame of demodulation tone ``m``.

    Args:
        pulled: Complex resonator frequency in GHz.
        tones: The drive.
        m: Demodulation index.
        t_grid: Ascending sample times in µs, not before ``t0``.
        a0: Amplitude at ``t0``.
        t0: Start time in µs.

    Returns:
        Complex samples of A(t).

    Raises:
        InputError: If the grid is not ascending or starts before ``t0``.
    """
    _check_demod(tones, m)
    t_grid = np.asarray(t_grid, dtype=float)
    if t0 < 0 or (t_grid.size and (t_grid[0] < t0 or np.any(np.diff(t_grid) < 0))):
        raise InputError("time grid must be ascending and start at or after t0 >= 0")
    return _trajectory_ns(pulled, tones, m, NS_PER_US * t_grid, NS_PER_US * t0, a0)


def integrated_amplitude(pulled: complex, tones: ToneSet, m: int, t1: float | None = None) -> complex:
    """Ā = ∫_0^T A(t) dt in ns from vacuum, for demodulation index ``m``.

    ``t1`` overrides the tone set's integration time (µs).
    """
    _check_demod(tones, m)
    t1 = tones.integration if t1 is None else t1
    return complex(_integral_ns(pulled, tones, m, 0.0, NS_PER_US * t1, 0.0))


def integrated_iq(pulled: complex, tones: ToneSet) -> np.ndarray:
    """Per-tone Ā(T)/T as complex values; (I, Q) = (Re, Im)."""
    t_ns = NS_PER_US * tones.integration
    return np.array(
        [_integral_ns(pulled, tones, m, 0.0, t_ns, 0.0) / t_ns for m in range(tones.count)]
    )


@dataclass(frozen=True)
class ShotSet:
    """Synthetic single-shot records.

    Attributes:
        values: Array (shots, 2D) of interleaved I/Q values.
        labels: Prepared state per shot.
        decayed: Whether the shot decayed during the readout window.
        tones: The drive used.
        noise_sigma: Gaussian noise per quadrature.
        seed: Generator seed.
    """

    values: np.ndarray
    labels: np.ndarray
    decayed: np.ndarray
    tones: ToneSet
    noise_sigma: float
    seed: int | None

    @property
    def records(self) -> list[IQRecord]:
        """The shots as labeled records."""
        return [IQRecord(v, int(label)) for v, label in zip(self.values, self.labels)]

    def decayed_fraction(self) -> dict[int, float]:
        """Fraction of decayed shots per prepared state."""
        return {
            int(state): float(self.decayed[self.labels == state].mean())
            for state in np.unique(self.labels)
        }


def synthesize_shots(
    states: Sequence[int],
    tones: ToneSet,
    pulled: Sequence[complex],
    noise_sigma: float,
    gamma1: Sequence[float],
    shots: int,
    seed: int | None = None,
) -> ShotSet:
    """Generates labeled single shots with decay during readout.

    Each shot draws a decay time τ ~ Exp(Γ1(j)). If τ >= T the record is the
    clean Ā/T of state j. Otherwise the trajectory runs under state j until τ
    and under state j-1 afterwards, starting from A(τ). Independent Gaussian
    noise of width σ is added to every quadrature.

    Args:
        states: Prepared states.
        tones: The drive.
        pulled: Complex resonator frequency per transmon state, indexed by state.
        noise_sigma: σ per quadrature, in record units.
        gamma1: Relaxation rate j → j-1 in µs⁻¹, indexed by state; Γ1(0) must be 0.
        shots: Shots per prepared state.
        seed: Seed for ``numpy.random.default_rng``.

    Raises:
        InputError: On a negative σ, a nonzero Γ1(0), or a state without rate or frequency.
    """
    if noise_sigma < 0:
        raise InputError(f"noise_sigma must be non-negative, got {noise_sigma}")
    if shots < 1:
        raise InputError(f"shots must be positive, got {shots}")
    if gamma1 and gamma1[0] != 0:
        raise InputError("ground state cannot decay; gamma1[0] must be 0")
    for state in states:
        if not (0 <= state < len(gamma1) and state < len(pulled)):
            raise InputError(f"state {state} has no decay rate or pulled frequency")
        if gamma1[state] < 0:
            raise InputError(f"gamma1[{state}] must be non-negative")

    integration = tones.integration
    stretched = [s for s in states if gamma1[s] * integration > DECAY_VALIDITY]
    if stretched:
        warnings.warn(
            f"states {stretched} have Γ1·T above {DECAY_VALIDITY}; single-decay approximation is stretched",
            ApproximationValidityWarning,
            stacklevel=2,
        )

    rng = np.random.default_rng(seed)
    t_ns = NS_PER_US * integration
    blocks, labels, decayed = [], [], []
    for state in states:
        clean = integrated_iq(pulled[state], tones)
        amplitudes = np.tile(clean, (shots, 1))
        rate = gamma1[state]
        tau = rng.exponential(1.0 / rate, size=shots) if rate > 0 else np.full(shots, math.inf)
        jumped = tau < integration

        if np.any(jumped):
            tau_ns = NS_PER_US * tau[jumped]
            for m in range(tones.count):
                before = _integral_ns(pulled[state], tones, m, 0.0, tau_ns, 0.0)
                a_tau = _trajectory_ns(pulled[state], tones, m, tau_ns, 0.0, 0.0)
                after = _integral_ns(pulled[state - 1], tones, m, tau_ns, t_ns, a_tau)
                amplitudes[jumped, m] = (before + after) / t_ns

        blocks.append(iq_vector(amplitudes))
        labels.append(np.full(shots, state))
        decayed.append(jumped)

    values = np.vstack(blocks)
    values = values + rng.normal(0.0, noise_sigma, size=values.shape) if noise_sigma > 0 else values
    return ShotSet(
        values=values,
        labels=np.concatenate(labels),
        decayed=np.concatenate(decayed),
        tones=tones,
        noise_sigma=float(noise_sigma),
        seed=seed,
    )


def group_tone_frequencies(pulled: Sequence[complex], groups: Sequence[Sequence[int]]) -> list[float]:
    """Places one tone at the mean pulled frequency of each group of states.

    Args:
        pulled: Complex or real resonator frequency per state.
        groups: States each tone should separate, e.g. [[0, 1, 2, 3], [3, 4, 5, 6]].

    Returns:
        Tone frequencies in GHz.
    """
    if not groups or any(len(group) == 0 for group in groups):
        raise InputError("every tone group needs at least one state")
    return [float(np.mean([np.real(pulled[s]) for s in group])) for group in groups]
