"""Relaxation budget of a transmon qudit.

Three single-photon channels i → i-1 are modeled, each returned in µs⁻¹.

* Quasiparticles: Γ = |⟨i-1|sin(φ/2)|i⟩|²·S_QP(f) with the linear matrix
  element approximation i·E_C/f01 and
  S_QP(f) = x_qp·(8E_J/πħ)·√(2Δ/hf). With E_J in GHz, 8E_J/πħ = 16·E_J ns⁻¹.
* Purcell: Γ = 2π·κ·g²·|⟨i-1|n̂|i⟩|²/(f_{i-1,i} - f_r)² with κ, g and f in
  GHz, giving ns⁻¹.
* Dielectric: Γ = 8E_C·|⟨i-1|n̂|i⟩|²/(ħ·Q(f))·[1 + coth(hf/2k_BT)] with
  Q(f) = Q0·(6 GHz/f)^ε and 8E_C/ħ = 2π·8E_C ns⁻¹.

``fit_dielectric_params`` recovers (Q0, ε) from measured rates with the
quasiparticle and Purcell channels held fixed. ``RelaxationBudget`` wraps the
calculations with logging.

**Usage:**
```python
params = NoiseParams(x_qp=1e-8, gap=200.0, q_diel0=3e6, epsilon=0.7)
breakdown = total_gamma(sol, resonator, params, 9)
fit = fit_dielectric_params(rates, sol, resonator, params)
```
"""

import csv
import math
import warnings
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
import scipy.optimize

from .dispersive import ResonatorModel
from .errors import (
    DispersiveBreakdownWarning,
    FitError,
    InfeasibleError,
    InputError,
    InvalidModelError,
)
from .hamiltonian import EigenSolution
from .logger import Logger
from .units import BOLTZMANN, PER_NS_TO_PER_US, TWO_PI, ghz_to_joules, micro_ev_to_joules

DEFAULT_TEMPERATURE = 0.010
REFERENCE_FREQUENCY = 6.0
QP_PREFACTOR = 16.0
MIN_FIT_LEVELS = 3


@dataclass(frozen=True)
class NoiseParams:
    """Parameters of the quasiparticle and dielectric channels.

    Attributes:
        x_qp: Quasiparticle density normalized to the Cooper-pair density.
        gap: Superconducting gap Δ in µeV.
        q_diel0: Dielectric quality factor at 6 GHz.
        epsilon: Frequency exponent of the dielectric quality factor.
        temperature: Bath temperature in K.
    """

    x_qp: float
    gap: float
    q_diel0: float
    epsilon: float
    temperature: float = DEFAULT_TEMPERATURE

    def __post_init__(self) -> None:
        """Checks invariants.

        Raises:
            InvalidModelError: If a parameter is out of range.
        """
        if not self.x_qp >= 0:
            raise InvalidModelError(f"x_qp must be non-negative, got {self.x_qp}")
        for name in ("gap", "q_diel0", "epsilon", "temperature"):
            value = getattr(self, name)
            if not value > 0:
                raise InvalidModelError(f"{name} must be positive, got {value}")

    def replace(self, **changes) -> "NoiseParams":
        """Returns a copy with ``changes`` applied."""
        return replace(self, **changes)

    def to_dict(self) -> dict:
        """Plain-dict form used by device files and reports."""
        return {
            "x_qp": self.x_qp,
            "gap": self.gap,
            "q_diel0": self.q_diel0,
            "epsilon": self.epsilon,
            "temperature": self.temperature,
        }


@dataclass(frozen=True)
class RelaxationBreakdown:
    """Per-channel decay rates of level ``level`` in µs⁻¹."""

    level: int
    qp: float
    purcell: float
    dielectric: float
    warnings: tuple[str, ...] = ()

    @property
    def total(self) -> float:
        """Sum of the channels."""
        return self.qp + self.purcell + self.dielectric

    @property
    def t1(self) -> float:
        """Coherence limit 1/Γ in µs."""
        return math.inf if self.total == 0 else 1.0 / self.total

    def to_dict(self) -> dict:
        """Plain-dict form for reports."""
        return {
            "level": self.level,
            "qp": self.qp,
            "purcell": self.purcell,
            "dielectric": self.dielectric,
            "total": self.total,
            "t1_us": self.t1,
            "warnings": list(self.warnings),
        }


@dataclass(frozen=True)
class DielectricFit:
    """Fitted dielectric law and the fit's log-rate residuals."""

    q_diel0: float
    epsilon: float
    levels: tuple[int, ...]
    residuals: np.ndarray
    include_qp: bool = True

    def to_dict(self) -> dict:
        """Plain-dict form for reports."""
        return {
            "q_diel0": self.q_diel0,
            "epsilon": self.epsilon,
            "levels": list(self.levels),
            "log_residuals": self.residuals.tolist(),
            "include_qp": self.include_qp,
        }


class T1Series(NamedTuple):
    """Measured T1 per level with uncertainties, all in µs."""

    levels: np.ndarray
    t1: np.ndarray
    uncertainty: np.ndarray

    @property
    def rates(self) -> np.ndarray:
        """1/T1 in µs⁻¹."""
        return 1.0 / self.t1

    @property
    def log_uncertainty(self) -> np.ndarray:
        """Uncertainty of log Γ, equal to σ_T/T."""
        return self.uncertainty / self.t1


def _check_level(sol: EigenSolution, i: int) -> None:
    if i < 1:
        raise InputError(f"decay level must be at least 1, got {i}")
    if i >= sol.levels:
        raise InputError(f"level {i} is not among the {sol.levels} retained levels")


def _decay_frequency(sol: EigenSolution, i: int) -> float:
    return float(sol.energies[i] - sol.energies[i - 1])


def _charge_element_squared(sol: EigenSolution, i: int) -> float:
    return float(sol.charge_operator[i - 1, i] ** 2)


def thermal_factor(f: float, temperature: float) -> float:
    """1 + coth(hf/2k_BT); tends to 2 as T → 0."""
    x = ghz_to_joules(f) / (2.0 * BOLTZMANN * temperature)
    return float(1.0 + 1.0 / np.tanh(x))


def dielectric_quality(f: float, params: NoiseParams) -> float:
    """Q(f) = Q0·(6 GHz/f)^ε."""
    return params.q_diel0 * (REFERENCE_FREQUENCY / f) ** params.epsilon


def gamma_qp(sol: EigenSolution, params: NoiseParams, i: int) -> float:
    """Quasiparticle decay rate of level ``i`` in µs⁻¹.

    Uses E_J1 of the model and its own f01.
    """
    _check_level(sol, i)
    if params.x_qp == 0:
        return 0.0
    model = sol.model
    f = _decay_frequency(sol, i)
    element = i * model.e_c / sol.transition(0)
    spectral = (
        params.x_qp
        * QP_PREFACTOR
        * model.e_j[0]
        * math.sqrt(2.0 * float(micro_ev_to_joules(params.gap)) / float(ghz_to_joules(f)))
    )
    return element * spectral * PER_NS_TO_PER_US


def gamma_purcell(sol: EigenSolution, res: ResonatorModel, i: int) -> float:
    """Purcell decay rate of level ``i`` through the readout resonator in µs⁻¹.

    Warns with ``DispersiveBreakdownWarning`` when the transition lies within
    a linewidth of the resonator.
    """
    _check_level(sol, i)
    if res.g == 0:
        return 0.0
    detuning = _decay_frequency(sol, i) - res.f_r
    if abs(detuning) < res.kappa:
        warnings.warn(
            f"transition {i - 1}-{i} is within κ of the resonator; Purcell rate is unreliable",
            DispersiveBreakdownWarning,
            stacklevel=2,
        )
    rate = TWO_PI * res.kappa * res.g**2 * _charge_element_squared(sol, i) / detuning**2
    return rate * PER_NS_TO_PER_US


def _unit_q_dielectric_rate(sol: EigenSolution, i: int, temperature: float) -> float:
    """Dielectric rate at Q = 1 in µs⁻¹."""
    f = _decay_frequency(sol, i)
    rate = TWO_PI * 8.0 * sol.model.e_c * _charge_element_squared(sol, i) * thermal_factor(f, temperature)
    return rate * PER_NS_TO_PER_US


def gamma_dielectric(sol: EigenSolution, params: NoiseParams, i: int) -> float:
    """Dielectric decay rate of level ``i`` in µs⁻¹."""
    _check_level(sol, i)
    return _unit_q_dielectric_rate(sol, i, params.temperature) / dielectric_quality(_decay_frequency(sol, i), params)


def total_gamma(sol: EigenSolution, res: ResonatorModel, params: NoiseParams, i: int) -> RelaxationBreakdown:
    """All channels of level ``i``; channel warnings are re-emitted and recorded."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        breakdown = RelaxationBreakdown(
            level=i,
            qp=gamma_qp(sol, params, i),
            purcell=gamma_purcell(sol, res, i),
            dielectric=gamma_dielectric(sol, params, i),
        )
    for w in caught:
        warnings.warn_explicit(w.message, w.category, w.filename, w.lineno)
    return replace(breakdown, warnings=tuple(str(w.message) for w in caught))


def read_t1_csv(path: str) -> T1Series:
    """Reads ``level,t1_us,uncertainty_us`` rows.

    Raises:
        InputError: On a malformed file or a non-positive T1.
    """
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or not {"level", "t1_us"} <= set(reader.fieldnames):
            raise InputError(f"{path} needs level and t1_us columns")
        levels, t1, sigma = [], [], []
        for line, row in enumerate(reader, start=2):
            try:
                levels.append(int(row["level"]))
                t1.append(float(row["t1_us"]))
                sigma.append(float(row.get("uncertainty_us") or "nan"))
            except (TypeError, ValueError) as e:
                raise InputError(f"{path}:{line} is malformed") from e
    series = T1Series(np.array(levels), np.array(t1), np.array(sigma))
    if series.levels.size == 0:
        raise InputError(f"{path} has no rows")
    if np.any(series.t1 <= 0):
        raise InputError(f"{path} contains a non-positive T1")
    return series


def fit_dielectric_params(
    measured_rates,
    sol: EigenSolution,
    res: ResonatorModel,
    params: NoiseParams,
    levels=None,
    weights=None,
    include_qp: bool = True,
) -> DielectricFit:
    """Fits (Q0, ε) to measured total rates in log-rate space.

    The quasiparticle (unless ``include_qp`` is false) and Purcell channels are
    computed from ``params`` and ``res`` and held fixed.

    Args:
        measured_rates: Γ1 per level in µs⁻¹.
        sol: Eigen-solution with enough retained levels.
        res: The readout resonator.
        params: Fixed x_qp, gap and temperature; its Q0 and ε are ignored.
        levels: Levels of ``measured_rates``; defaults to 1, 2, ...
        weights: Optional per-level weights of the log residuals, such as T/σ_T.
        include_qp: Whether the quasiparticle channel is part of the floor.

    Raises:
        InputError: On fewer than three levels or mismatched lengths.
        InfeasibleError: If a measured rate does not exceed the fixed floor.
        FitError: If the least-squares fit fails.
    """
    rates = np.asarray(measured_rates, dtype=float)
    levels = np.arange(1, rates.size + 1) if levels is None else np.asarray(levels, dtype=int)
    if rates.size < MIN_FIT_LEVELS:
        raise InputError(f"at least {MIN_FIT_LEVELS} levels are needed, got {rates.size}")
    if levels.shape != rates.shape:
        raise InputError(f"{levels.size} levels for {rates.size} rates")
    w = np.ones_like(rates) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != rates.shape:
        raise InputError(f"{w.size} weights for {rates.size} rates")

    floor = np.array(
        [(gamma_qp(sol, params, i) if include_qp else 0.0) + gamma_purcell(sol, res, i) for i in levels]
    )
    base = np.array([_unit_q_dielectric_rate(sol, i, params.temperature) for i in levels])
    log_f = np.log(np.array([_decay_frequency(sol, i) for i in levels]) / REFERENCE_FREQUENCY)

    excess = rates - floor
    for i, value, fixed in zip(levels, excess, floor):
        if value <= 0:
            raise InfeasibleError(
                f"Measured rate at level {i} is below the fixed-channel floor of {fixed:.4g} µs⁻¹.",
                level=int(i),
                diagnostics={"floor": float(fixed), "measured": float(value + fixed)},
            )

    # log Γ_diel = log base - log Q0 + ε·log(f/6) seeds the fit
    slope, intercept = np.polyfit(log_f, np.log(excess / base), 1)
    theta0 = np.array([-intercept, slope])

    def residuals(theta: np.ndarray) -> np.ndarray:
        dielectric = base * np.exp(-theta[0] + theta[1] * log_f)
        return w * (np.log(floor + dielectric) - np.log(rates))

    result = scipy.optimize.least_squares(residuals, theta0, method="lm")
    if not result.success:
        raise FitError(
            f"Dielectric fit failed: {result.message}",
            best_point={"q_diel0": float(np.exp(result.x[0])), "epsilon": float(result.x[1])},
        )
    return DielectricFit(
        q_diel0=float(np.exp(result.x[0])),
        epsilon=float(result.x[1]),
        levels=tuple(int(i) for i in levels),
        residuals=result.fun / w,
        include_qp=include_qp,
    )


class RelaxationBudget:
    """Evaluates and fits the relaxation budget of one transmon."""

    def __init__(
        self,
        logger: Logger,
        sol: EigenSolution,
        res: ResonatorModel,
        params: NoiseParams,
    ) -> None:
        """Initializes the budget.

        Args:
            logger: Logger for results and forwarded warnings.
            sol: Eigen-solution of the transmon.
            res: Its readout resonator.
            params: Noise parameters.
        """
        self._log: Logger = logger
        self._sol: EigenSolution = sol
        self._res: ResonatorModel = res
        self._params: NoiseParams = params

    def breakdown(self, levels: int, params: NoiseParams | None = None) -> list[RelaxationBreakdown]:
        """Channel rates for levels 1..``levels``."""
        params = params or self._params
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            rows = [total_gamma(self._sol, self._res, params, i) for i in range(1, levels + 1)]
        self._log.log_warnings(caught, budget="breakdown")
        self._log.debug("Computed relaxation budget.", levels=levels, **params.to_dict())
        return rows

    def scaling_table(self, levels: int, x_qp_values, epsilon_values) -> dict[str, list[float]]:
        """Rate-versus-level curves for several x_qp and ε.

        Returns:
            Column name to rates over levels 1..``levels``. Columns are
            ``level``, ``purcell``, ``qp_x=<x>`` and ``diel_eps=<ε>``.
        """
        table: dict[str, list[float]] = {"level": [float(i) for i in range(1, levels + 1)]}
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            table["purcell"] = [gamma_purcell(self._sol, self._res, i) for i in range(1, levels + 1)]
            for x_qp in x_qp_values:
                params = self._params.replace(x_qp=x_qp)
                table[f"qp_x={x_qp:g}"] = [gamma_qp(self._sol, params, i) for i in range(1, levels + 1)]
            for epsilon in epsilon_values:
                params = self._params.replace(epsilon=epsilon)
                table[f"diel_eps={epsilon:g}"] = [
                    gamma_dielectric(self._sol, params, i) for i in range(1, levels + 1)
                ]
        self._log.log_warnings(caught, budget="scaling")
        return table

    def fit_dielectric_params(self, series: T1Series, weighted: bool = False, include_qp: bool = True) -> DielectricFit:
        """Dielectric fit of a measured T1 series; see ``fit_dielectric_params``."""
        weights = None
        if weighted:
            if not np.all(np.isfinite(series.uncertainty)) or np.any(series.uncertainty <= 0):
                raise InputError("weighted fit needs positive uncertainties for every level")
            weights = 1.0 / series.log_uncertainty
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            try:
                fit = fit_dielectric_params(
                    series.rates,
                    self._sol,
                    self._res,
                    self._params,
                    levels=series.levels,
                    weights=weights,
                    include_qp=include_qp,
                )
            except InfeasibleError as e:
                self._log.error("Measured rates are infeasible.", err=e, infeasible_level=e.level)
                raise
        self._log.log_warnings(caught, budget="fit")
        self._log.info(
            "Fitted dielectric law.",
            q_diel0=fit.q_diel0,
            epsilon=fit.epsilon,
            weighted=weighted,
            include_qp=include_qp,
        )
        return fit
