"""Exponential decay fits for T1 and randomized benchmarking.

Times are in µs throughout. ``fit_exponential`` fits A·e^{-t/T} + C and
``fit_rb`` fits A·r^m + C over Clifford depth m.

**Usage:**
```python
t1 = fit_exponential(times, populations)
rb, e_f = fit_rb(depths, survival, d_subspace=2)
```
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from ..errors import FitError, InputError

MIN_POINTS = 4
MAX_SPAN_RATIO = 100.0


@dataclass(frozen=True)
class DecayFit:
    """Result of a decay fit.

    Attributes:
        model: "exponential" (``decay`` is T in µs) or "rb" (``decay`` is r per Clifford).
        amplitude: A.
        decay: T or r.
        offset: C.
        covariance: 3x3 covariance of (A, decay, C).
        rms_residual: Root-mean-square residual of the fit.
    """

    model: str
    amplitude: float
    decay: float
    offset: float
    covariance: np.ndarray = field(repr=False)
    rms_residual: float

    @property
    def stderr(self) -> np.ndarray:
        """Standard errors of (A, decay, C)."""
        return np.sqrt(np.diag(self.covariance))

    @property
    def decay_stderr(self) -> float:
        """Standard error of T or r."""
        return float(self.stderr[1])

    def to_dict(self) -> dict:
        """Plain-dict form for reports."""
        return {
            "model": self.model,
            "amplitude": self.amplitude,
            "decay": self.decay,
            "offset": self.offset,
            "stderr": self.stderr.tolist(),
            "rms_residual": self.rms_residual,
        }


def _as_series(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.shape[-1] != x.size:
        raise InputError(f"{x.size} abscissae do not match data of shape {y.shape}")
    if x.size < MIN_POINTS:
        raise InputError(f"at least {MIN_POINTS} points are needed, got {x.size}")
    if np.any(np.diff(x) <= 0):
        raise InputError("abscissae must be strictly ascending")
    if not np.all(np.isfinite(y)):
        raise InputError("data contain non-finite values")
    return x, y


def _log_linear_guess(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Seeds (A, slope, C) from a straight line through log|y - C|."""
    sign = np.sign(y[0] - y[-1])
    spread = float(np.ptp(y))
    if sign == 0 or spread == 0:
        raise FitError("Data do not decay.", diagnostics={"spread": spread})
    offset = float(y.min() if sign > 0 else y.max()) - sign * 0.01 * spread
    shifted = sign * (y - offset)
    keep = shifted > 0
    slope, intercept = np.polyfit(x[keep], np.log(shifted[keep]), 1)
    if slope >= 0:
        raise FitError("Data do not decay.", diagnostics={"log_slope": float(slope)})
    return float(sign * math.exp(intercept)), float(slope), offset


def _finish(model: str, params, cov, residuals: np.ndarray) -> DecayFit:
    cov = np.asarray(cov, dtype=float)
    if not np.all(np.isfinite(cov)):
        raise FitError(
            "Fit covariance is not finite.",
            best_point={"amplitude": params[0], "decay": params[1], "offset": params[2]},
        )
    return DecayFit(
        model=model,
        amplitude=float(params[0]),
        decay=float(params[1]),
        offset=float(params[2]),
        covariance=cov,
        rms_residual=float(np.sqrt(np.mean(residuals**2))),
    )


def exponential(t, amplitude: float, time_constant: float, offset: float):
    """A·e^{-t/T} + C."""
    return amplitude * np.exp(-np.asarray(t) / time_constant) + offset


def fit_exponential(times, values) -> DecayFit:
    """Fits A·e^{-t/T} + C, seeded by a log-linear fit.

    Args:
        times: Ascending times in µs.
        values: Measured values at ``times``.

    Raises:
        InputError: On fewer than four points or unsorted times.
        FitError: If the data do not decay or the fit diverges.
    """
    t, y = _as_series(times, values)
    amplitude, slope, offset = _log_linear_guess(t, y)
    span = float(t[-1] - t[0])
    p0 = [amplitude, -1.0 / slope, offset]
    try:
        params, cov = scipy.optimize.curve_fit(exponential, t, y, p0=p0, maxfev=10000)
    except (RuntimeError, ValueError) as e:
        raise FitError(f"Exponential fit failed: {e}", best_point=dict(zip(("amplitude", "decay", "offset"), p0))) from e

    if not 0 < params[1] <= MAX_SPAN_RATIO * span:
        raise FitError(
            f"Fitted time constant {params[1]:.4g} µs is outside (0, {MAX_SPAN_RATIO:g}·span].",
            best_point={"amplitude": params[0], "decay": params[1], "offset": params[2]},
        )
    return _finish("exponential", params, cov, y - exponential(t, *params))


def rb_decay(m, amplitude: float, r: float, offset: float):
    """A·r^m + C."""
    return amplitude * np.power(r, np.asarray(m, dtype=float)) + offset


def process_infidelity(r: float, d: int) -> float:
    """e_f = (1 - r)(1 - 1/d²)."""
    return (1.0 - r) * (1.0 - 1.0 / d**2)


def error_per_clifford(r: float, d: int) -> float:
    """Average error per Clifford, (1 - r)(d - 1)/d."""
    return (1.0 - r) * (d - 1) / d


def fit_rb(depths, survival, d_subspace: int = 2) -> tuple[DecayFit, float]:
    """Fits A·r^m + C to randomized-benchmarking survival data.

    Args:
        depths: Ascending Clifford depths.
        survival: Survival probabilities, either one value per depth or an
            array of shape (randomizations, depths). With several
            randomizations the per-depth standard error weights the fit.
        d_subspace: Dimension of the benchmarked subspace.

    Returns:
        The fit and its process infidelity e_f.

    Raises:
        InputError: On fewer than four depths or ``d_subspace`` < 2.
        FitError: If r leaves (0, 1] or the fit diverges.
    """
    if d_subspace < 2:
        raise InputError(f"d_subspace must be at least 2, got {d_subspace}")
    m, p = _as_series(depths, survival)

    sigma = None
    if p.ndim == 2:
        if p.shape[0] > 1:
            sigma = p.std(axis=0, ddof=1) / math.sqrt(p.shape[0])
            sigma = np.where(sigma > 0, sigma, sigma[sigma > 0].min() if np.any(sigma > 0) else 1.0)
        p = p.mean(axis=0)

    offset = 1.0 / d_subspace
    amplitude = float(p[0] - offset) or 0.5
    ratio = (p - offset) / amplitude
    keep = ratio > 0
    r0 = math.exp(np.polyfit(m[keep], np.log(ratio[keep]), 1)[0]) if keep.sum() >= 2 else 0.99
    r0 = min(max(r0, 1e-3), 1.0 - 1e-9)

    try:
        params, cov = scipy.optimize.curve_fit(
            rb_decay,
            m,
            p,
            p0=[amplitude, r0, offset],
            sigma=sigma,
            absolute_sigma=sigma is not None,
            bounds=([-np.inf, 0.0, -np.inf], [np.inf, 1.0, np.inf]),
            maxfev=10000,
        )
    except (RuntimeError, ValueError) as e:
        raise FitError(f"RB fit failed: {e}", best_point={"amplitude": amplitude, "decay": r0, "offset": offset}) from e

    if not 0 < params[1] <= 1:
        raise FitError(
            f"Fitted decay r = {params[1]:.6g} is outside (0, 1].",
            best_point={"amplitude": params[0], "decay": params[1], "offset": params[2]},
        )
    fit = _finish("rb", params, cov, p - rb_decay(m, *params))
    return fit, process_infidelity(fit.decay, d_subspace)


def coherence_limited_error(t_gate: float, t1: float, t2: float) -> float:
    """Average gate error of an idle qubit for a gate of length ``t_gate``.

    All times in the same unit.
    """
    if t1 <= 0 or t2 <= 0 or t_gate < 0:
        raise InputError("coherence times must be positive and t_gate non-negative")
    return (3.0 - math.exp(-t_gate / t1) - 2.0 * math.exp(-t_gate / t2)) / 6.0


def pure_dephasing_time(t1: float, t2e: float) -> float:
    """T_φ from 1/T_φ = 1/T2E - 1/(2·T1); ``inf`` when the echo is relaxation-limited."""
    if t1 <= 0 or t2e <= 0:
        raise InputError("coherence times must be positive")
    rate = 1.0 / t2e - 1.0 / (2.0 * t1)
    return math.inf if rate <= 0 else 1.0 / rate
