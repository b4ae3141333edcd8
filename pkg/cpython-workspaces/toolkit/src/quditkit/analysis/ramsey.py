"""Ramsey fits with charge-parity beating.

Offset-charge noise splits each transition into an even and an odd parity
branch. A Ramsey signal then beats between the two:

    P(t) = C + e^{-t/T2R}·[A0·cos(2π f_e t + φ0) + A1·cos(2π f_o t + φ1)]

The fit is seeded from the two largest peaks of a Hann-windowed, zero-padded
spectrum. Phases are held at zero unless the beat exceeds 2 MHz. Times are in
µs; frequencies are reported in GHz with f_e ≤ f_o.

**Usage:**
```python
fit = fit_ramsey_beat(times_us, normalized)
delta_f = extract_delta_f([fit, other_fit])
```
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.optimize
import scipy.signal

from ..errors import DegenerateBeatWarning, FitError, InputError

MHZ_PER_GHZ = 1e3
PHASE_FREE_BEAT = 0.002
SECOND_PEAK_RATIO = 0.2
NYQUIST_MARGIN = 0.95
PADDING_FACTOR = 8
MIN_POINTS = 8


@dataclass(frozen=True)
class RamseyBeatFit:
    """A fitted Ramsey signal.

    Attributes:
        offset: C.
        t2r: Decay time in µs.
        a0: Amplitude of the lower-frequency branch.
        a1: Amplitude of the higher-frequency branch.
        f_e: Lower branch detuning in GHz.
        f_o: Higher branch detuning in GHz.
        phi0: Phase of the lower branch in radians.
        phi1: Phase of the higher branch in radians.
        rms_residual: Root-mean-square fit residual.
        phases_free: Whether the phases were fitted.
        warnings: Messages of warnings raised during the fit.
    """

    offset: float
    t2r: float
    a0: float
    a1: float
    f_e: float
    f_o: float
    phi0: float
    phi1: float
    rms_residual: float
    phases_free: bool = False
    warnings: tuple[str, ...] = ()

    @property
    def beat(self) -> float:
        """|f_o - f_e| in GHz."""
        return abs(self.f_o - self.f_e)

    def to_dict(self) -> dict:
        """Plain-dict form for reports."""
        return {
            "offset": self.offset,
            "t2r_us": self.t2r,
            "a0": self.a0,
            "a1": self.a1,
            "f_e": self.f_e,
            "f_o": self.f_o,
            "phi0": self.phi0,
            "phi1": self.phi1,
            "beat": self.beat,
            "rms_residual": self.rms_residual,
            "phases_free": self.phases_free,
            "warnings": list(self.warnings),
        }


def beat_signal(t, offset, t2r, a0, a1, f_e, f_o, phi0=0.0, phi1=0.0):
    """The two-branch Ramsey model with t in µs and frequencies in MHz."""
    t = np.asarray(t, dtype=float)
    envelope = np.exp(-t / t2r)
    return offset + envelope * (
        a0 * np.cos(2 * np.pi * f_e * t + phi0) + a1 * np.cos(2 * np.pi * f_o * t + phi1)
    )


def _fixed_phase_signal(t, offset, t2r, a0, a1, f_e, f_o):
    return beat_signal(t, offset, t2r, a0, a1, f_e, f_o)


def _single_signal(t, offset, t2r, a0, f):
    return beat_signal(t, offset, t2r, a0, 0.0, f, f)


def spectrum_peaks(times, values) -> tuple[np.ndarray, np.ndarray, float]:
    """Peak frequencies (MHz) and heights of the windowed spectrum, strongest first.

    Also returns the Nyquist frequency in MHz.

    Raises:
        InputError: If the times are not uniformly spaced.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    step = np.diff(t)
    if not np.allclose(step, step[0], rtol=1e-6, atol=0):
        raise InputError("Ramsey times must be uniformly spaced")
    dt = float(step[0])

    n = PADDING_FACTOR * (1 << int(math.ceil(math.log2(t.size))))
    windowed = (y - y.mean()) * np.hanning(t.size)
    magnitude = np.abs(np.fft.rfft(windowed, n=n))
    freqs = np.fft.rfftfreq(n, dt)
    # skip the DC bin; peaks at the boundary are not reported
    peaks, _ = scipy.signal.find_peaks(magnitude[1:])
    peaks = peaks + 1
    order = np.argsort(magnitude[peaks])[::-1]
    return freqs[peaks[order]], magnitude[peaks[order]], 0.5 / dt


def fit_ramsey_beat(times, populations) -> RamseyBeatFit:
    """Fits the beating Ramsey model to a population trace.

    Args:
        times: Uniformly spaced delays in µs.
        populations: Normalized populations at ``times``.

    Returns:
        The fit. A single-peak spectrum yields f_e = f_o and A1 = 0 with a
        ``DegenerateBeatWarning``.

    Raises:
        InputError: If the trace is too short, unevenly sampled, or its
            dominant frequency is at the Nyquist limit.
        FitError: If the least-squares fit does not converge.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(populations, dtype=float)
    if t.shape != y.shape or t.ndim != 1:
        raise InputError(f"times {t.shape} and populations {y.shape} must be matching 1-d series")
    if t.size < MIN_POINTS:
        raise InputError(f"at least {MIN_POINTS} points are needed, got {t.size}")

    freqs, heights, nyquist = spectrum_peaks(t, y)
    if freqs.size == 0:
        raise FitError("Ramsey trace has no oscillation.", diagnostics={"points": int(t.size)})
    if freqs[0] >= NYQUIST_MARGIN * nyquist:
        raise InputError(
            f"dominant frequency {freqs[0]:.4g} MHz is at the {nyquist:.4g} MHz Nyquist limit; sample faster"
        )

    offset = float(y.mean())
    head = y[: max(2, t.size // 10)] - offset
    total = float(head[np.argmax(np.abs(head))])
    t2r = float(t[-1] - t[0]) / 3.0
    caught: list[str] = []

    two_peaks = freqs.size > 1 and heights[1] >= SECOND_PEAK_RATIO * heights[0]
    if not two_peaks:
        message = "Ramsey spectrum has a single peak; reporting f_e = f_o"
        warnings.warn(message, DegenerateBeatWarning, stacklevel=2)
        caught.append(message)
        try:
            params, _ = scipy.optimize.curve_fit(
                _single_signal,
                t,
                y,
                p0=[offset, t2r, total, freqs[0]],
                bounds=([-np.inf, 1e-9, -np.inf, 0.0], [np.inf, np.inf, np.inf, nyquist]),
                maxfev=20000,
            )
        except (RuntimeError, ValueError) as e:
            raise FitError(f"Ramsey fit failed: {e}", best_point={"f": float(freqs[0]) / MHZ_PER_GHZ}) from e
        c, tau, a, f = params
        residual = y - _single_signal(t, *params)
        return RamseyBeatFit(
            offset=float(c),
            t2r=float(tau),
            a0=float(a),
            a1=0.0,
            f_e=float(f) / MHZ_PER_GHZ,
            f_o=float(f) / MHZ_PER_GHZ,
            phi0=0.0,
            phi1=0.0,
            rms_residual=float(np.sqrt(np.mean(residual**2))),
            warnings=tuple(caught),
        )

    low, high = sorted((0, 1), key=lambda k: freqs[k])
    share = heights[low] / (heights[0] + heights[1])
    p0 = [offset, t2r, total * share, total * (1 - share), freqs[low], freqs[high]]
    lower = [-np.inf, 1e-9, -np.inf, -np.inf, 0.0, 0.0]
    upper = [np.inf, np.inf, np.inf, np.inf, nyquist, nyquist]
    try:
        params, _ = scipy.optimize.curve_fit(
            _fixed_phase_signal, t, y, p0=p0, bounds=(lower, upper), maxfev=20000
        )
        phases = (0.0, 0.0)
        phases_free = abs(params[5] - params[4]) > PHASE_FREE_BEAT * MHZ_PER_GHZ
        if phases_free:
            full, _ = scipy.optimize.curve_fit(
                beat_signal,
                t,
                y,
                p0=[*params, 0.0, 0.0],
                bounds=(lower + [-np.inf, -np.inf], upper + [np.inf, np.inf]),
                maxfev=20000,
            )
            params, phases = full[:6], (full[6], full[7])
    except (RuntimeError, ValueError) as e:
        raise FitError(
            f"Ramsey fit failed: {e}",
            best_point={"f_e": p0[4] / MHZ_PER_GHZ, "f_o": p0[5] / MHZ_PER_GHZ, "t2r": t2r},
        ) from e

    c, tau, a0, a1, f_e, f_o = params
    phi0, phi1 = phases
    if f_e > f_o:
        a0, a1, f_e, f_o, phi0, phi1 = a1, a0, f_o, f_e, phi1, phi0
    residual = y - beat_signal(t, c, tau, a0, a1, f_e, f_o, phi0, phi1)
    return RamseyBeatFit(
        offset=float(c),
        t2r=float(tau),
        a0=float(a0),
        a1=float(a1),
        f_e=float(f_e) / MHZ_PER_GHZ,
        f_o=float(f_o) / MHZ_PER_GHZ,
        phi0=float(phi0),
        phi1=float(phi1),
        rms_residual=float(np.sqrt(np.mean(residual**2))),
        phases_free=bool(phases_free),
        warnings=tuple(caught),
    )


def extract_delta_f(fits) -> float:
    """δf = max |f_o - f_e| over repeated fits, in GHz.

    Raises:
        InputError: If ``fits`` is empty.
    """
    fits = list(fits)
    if not fits:
        raise InputError("at least one Ramsey fit is needed")
    return max(fit.beat for fit in fits)
