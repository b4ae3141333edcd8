"""Fitting transmon and resonator parameters to measured frequencies.

Two fits are provided. ``fit_standard`` finds (E_J, E_C) of the
single-harmonic model from f01 and f12 by root finding on exact
diagonalization. ``fit_harmonics`` fits the M-harmonic model
(E_C, E_J1..E_JM, f_r, g) to the lowest M+1 transitions and the two
resonator frequencies f_r,|0⟩ and f_r,|1⟩. Harmonics alternate in sign
through the parameterization E_Jm = (-1)^(m+1)·exp(θ_m). Both kinds of
observable come from second-order Schrieffer-Wolff: transitions are
differences of Lamb-shifted energies f̃_i and the resonator sits at
f_r + χ_i, so every observation depends on every parameter.

Predictions from a fit with a resonator are Lamb-shifted the same way;
standard fits predict bare transitions.

Residuals are always model minus measured, in GHz, ordered as the
transitions by index followed by f_r,|0⟩ and f_r,|1⟩.

``ModelFitter`` wraps the fits with logging for the CLI and for batch use.

**Usage:**
```python
fitter = ModelFitter(logger, seed=0)
standard = fitter.fit_standard(4.9472, 4.8437)
obs = ObservationSet(((0, 4.9472), (1, 4.8437), (2, 4.7356)), (6.468937, 6.468672))
fit = fitter.fit_harmonics(obs, harmonics=2)
prediction = fitter.predict_observables(fit, levels=11)
```
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .dispersive import WINDOW_PADDING, ResonatorModel, stark_and_lamb
from .errors import ArityError, FitError, InputError, QuditkitError
from .hamiltonian import DEFAULT_CUTOFF, TransmonModel, eigensolve
from .logger import Logger
from .spectrum import delta_f

STANDARD_TOLERANCE = 1e-6
HARMONICS_TOLERANCE = 1e-5
MAX_HARMONICS = 8
DEFAULT_KAPPA = 550e-6
_PENALTY = 1e6


@dataclass(frozen=True)
class ObservationSet:
    """Measured transition and resonator frequencies.

    Attributes:
        transition_freqs: Pairs (i, f_{i,i+1}) in GHz, sorted by index.
        resonator_freqs: Optional (f_r,|0⟩, f_r,|1⟩) in GHz.
    """

    transition_freqs: tuple[tuple[int, float], ...]
    resonator_freqs: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        """Sorts transitions and checks invariants.

        Raises:
            InputError: If indices repeat or a frequency is not positive.
        """
        pairs = tuple(sorted((int(i), float(f)) for i, f in self.transition_freqs))
        indices = [i for i, _ in pairs]
        if len(set(indices)) != len(indices):
            raise InputError(f"transition indices must be unique, got {indices}")
        if any(i < 0 for i in indices):
            raise InputError(f"transition indices must be non-negative, got {indices}")
        if any(not f > 0 for _, f in pairs):
            raise InputError("transition frequencies must be positive")
        object.__setattr__(self, "transition_freqs", pairs)

        if self.resonator_freqs is not None:
            resonator = tuple(float(f) for f in self.resonator_freqs)
            if len(resonator) != 2 or any(not f > 0 for f in resonator):
                raise InputError(f"resonator_freqs must be two positive values, got {resonator}")
            object.__setattr__(self, "resonator_freqs", resonator)

    @property
    def indices(self) -> tuple[int, ...]:
        """Transition indices in ascending order."""
        return tuple(i for i, _ in self.transition_freqs)

    @property
    def frequencies(self) -> tuple[float, ...]:
        """Transition frequencies in index order."""
        return tuple(f for _, f in self.transition_freqs)

    def transition(self, i: int) -> float | None:
        """Measured f_{i,i+1}, or None if not observed."""
        return dict(self.transition_freqs).get(i)

    def lowest(self, count: int) -> "ObservationSet":
        """Keeps transitions 0..count-1 and the resonator frequencies.

        Raises:
            ArityError: If any of the lowest ``count`` transitions is missing.
        """
        missing = [i for i in range(count) if self.transition(i) is None]
        if missing:
            raise ArityError(f"transitions {missing} are required but not observed")
        return ObservationSet(
            tuple((i, self.transition(i)) for i in range(count)),
            self.resonator_freqs,
        )

    def to_dict(self) -> dict:
        """Plain-dict form for reports."""
        return {
            "transition_freqs": [list(pair) for pair in self.transition_freqs],
            "resonator_freqs": None if self.resonator_freqs is None else list(self.resonator_freqs),
        }


@dataclass(frozen=True)
class FitResult:
    """Outcome of a parameter fit.

    Attributes:
        model: The fitted transmon.
        resonator: The fitted resonator, for harmonics fits.
        residuals: Model minus measured per observation, in GHz.
        converged: Whether the residual tolerance was met.
        iterations: Total objective evaluations.
        observations: The observations that were fitted.
        sequential_residuals: Residuals when the transmon is fitted to the
            transitions first and the resonator afterwards.
        warnings: Messages of warnings raised at the final point.
    """

    model: TransmonModel
    resonator: ResonatorModel | None
    residuals: tuple[float, ...]
    converged: bool
    iterations: int
    observations: ObservationSet
    sequential_residuals: tuple[float, ...] | None = None
    warnings: tuple[str, ...] = ()

    @property
    def harmonics(self) -> int:
        """Number of Josephson harmonics in the fitted model."""
        return self.model.harmonics

    @property
    def max_residual(self) -> float:
        """Largest absolute residual in GHz."""
        return float(np.max(np.abs(self.residuals)))

    def to_dict(self) -> dict:
        """Plain-dict form for reports."""
        e_j = self.model.e_j
        return {
            "harmonics": self.harmonics,
            "e_c": self.model.e_c,
            "e_j": list(e_j),
            "e_j2_over_e_j1": e_j[1] / e_j[0] if len(e_j) > 1 else None,
            "resonator": None if self.resonator is None else self.resonator.to_dict(),
            "residuals": list(self.residuals),
            "sequential_residuals": None
            if self.sequential_residuals is None
            else list(self.sequential_residuals),
            "converged": self.converged,
            "iterations": self.iterations,
            "observations": self.observations.to_dict(),
            "warnings": list(self.warnings),
        }


@dataclass(frozen=True)
class Prediction:
    """Model transitions and frequency fluctuations.

    Attributes:
        transitions: f_{i,i+1}^model in GHz for i = 0..levels-1.
        delta_f: δf^model = |ε_i| + |ε_{i+1}| in GHz per transition.
        dressed: Whether the transitions include the resonator's Lamb shift.
    """

    transitions: tuple[float, ...]
    delta_f: tuple[float, ...]
    dressed: bool = False

    def residuals(self, measured: ObservationSet) -> list[dict]:
        """Model minus measured per observed transition, with the dispersion band.

        Transitions that are not predicted are skipped.
        """
        rows = []
        for i, f in measured.transition_freqs:
            if i >= len(self.transitions):
                continue
            rows.append(
                {
                    "index": i,
                    "model": self.transitions[i],
                    "measured": f,
                    "residual": self.transitions[i] - f,
                    "delta_f": self.delta_f[i],
                }
            )
        return rows


def fit_standard(f01: float, f12: float, cutoff: int = DEFAULT_CUTOFF) -> FitResult:
    """Fits (E_J, E_C) of the standard model to f01 and f12.

    The root find runs in (ln E_C, ln E_J) from the closed-form inversion
    E_C = f01 - f12, E_J = (f01 + E_C)²/(8E_C).

    Raises:
        InputError: If the frequencies are not positive or f12 >= f01.
        FitError: If the residual stays above 1 kHz.
    """
    if not (f01 > 0 and f12 > 0):
        raise InputError(f"frequencies must be positive, got f01={f01}, f12={f12}")
    if f12 >= f01:
        raise InputError(f"f12 ({f12}) must be below f01 ({f01})")

    target = np.array([f01, f12])
    e_c0 = f01 - f12
    e_j0 = (f01 + e_c0) ** 2 / (8.0 * e_c0)

    def residuals(theta: np.ndarray) -> np.ndarray:
        e_c, e_j = np.exp(theta)
        try:
            sol = eigensolve(TransmonModel.standard(e_j, e_c, cutoff=cutoff), 3)
        except QuditkitError:
            return np.full(2, _PENALTY)
        return sol.transitions() - target

    result = scipy.optimize.root(residuals, np.log([e_c0, e_j0]), method="hybr", options={"xtol": 1e-13})
    e_c, e_j = np.exp(result.x)
    final = residuals(result.x)
    converged = bool(np.max(np.abs(final)) < STANDARD_TOLERANCE)
    if not converged:
        raise FitError(
            "Standard-model root find did not reproduce f01 and f12.",
            best_point={"e_c": float(e_c), "e_j": float(e_j)},
            diagnostics={"residuals": final.tolist(), "nfev": int(result.nfev), "message": result.message},
        )

    return FitResult(
        model=TransmonModel.standard(float(e_j), float(e_c), cutoff=cutoff),
        resonator=None,
        residuals=tuple(float(x) for x in final),
        converged=converged,
        iterations=int(result.nfev),
        observations=ObservationSet(((0, f01), (1, f12))),
    )


def _dressed(model: TransmonModel, resonator: ResonatorModel, levels: int) -> tuple[np.ndarray, np.ndarray]:
    """Lamb-shifted transitions f̃_{i+1} - f̃_i and pulls χ_i for the lowest ``levels`` levels."""
    sol = eigensolve(model, levels + WINDOW_PADDING)
    report = stark_and_lamb(sol, resonator, levels)
    return np.diff(report.lamb), np.array(report.chi)


class _HarmonicsProblem:
    """Objective of the M-harmonic fit in the parameter vector θ.

    θ = [ln E_C, ln|E_J1|, ..., ln|E_JM|, f_r, ln g].
    """

    def __init__(self, obs: ObservationSet, harmonics: int, kappa: float, cutoff: int) -> None:
        self.harmonics = harmonics
        self.kappa = kappa
        self.cutoff = cutoff
        self.indices = np.array(obs.indices)
        self.targets = np.array(obs.frequencies + obs.resonator_freqs)
        self.levels = int(self.indices.max()) + 2

    def unpack(self, theta: np.ndarray) -> tuple[TransmonModel, ResonatorModel]:
        """Transmon and resonator at θ."""
        h = self.harmonics
        e_j = tuple((-1) ** m * math.exp(theta[1 + m]) for m in range(h))
        model = TransmonModel(
            e_c=math.exp(theta[0]),
            e_j=e_j,
            cutoff=self.cutoff,
            alternating=True,
        )
        resonator = ResonatorModel(f_r=float(theta[h + 1]), g=math.exp(theta[h + 2]), kappa=self.kappa)
        return model, resonator

    def pack(self, model: TransmonModel, resonator: ResonatorModel) -> np.ndarray:
        """Inverse of ``unpack``."""
        return np.array(
            [math.log(model.e_c)]
            + [math.log(abs(x)) for x in model.e_j]
            + [resonator.f_r, math.log(resonator.g)]
        )

    def predict(self, theta: np.ndarray) -> np.ndarray:
        """Lamb-shifted transitions followed by the state-dependent resonator frequencies."""
        model, resonator = self.unpack(theta)
        transitions, chi = _dressed(model, resonator, self.levels)
        return np.concatenate([transitions[self.indices], resonator.f_r + chi[:2]])

    def residuals(self, theta: np.ndarray) -> np.ndarray:
        """Prediction minus targets; a flat penalty where the model is invalid."""
        try:
            with np.errstate(all="ignore"):
                return self.predict(theta) - self.targets
        except (QuditkitError, OverflowError, ValueError):
            return np.full(len(self.targets), _PENALTY)

    def cost(self, theta: np.ndarray) -> float:
        """Sum of squared residuals."""
        r = self.residuals(theta)
        return float(r @ r)


def _resonator_guess(model: TransmonModel, f_r0: float, f_r1: float, kappa: float) -> ResonatorModel:
    """Solves (f_r, g) from the two resonator frequencies with the transmon fixed.

    g follows from Δχ ∝ g², then f_r = f_r,|0⟩ - χ_0; three passes settle the
    dependence of χ on f_r.
    """
    sol = eigensolve(model, 2 + WINDOW_PADDING)
    f_r = f_r0
    g = 0.03
    for _ in range(3):
        unit = stark_and_lamb(sol, ResonatorModel(f_r=f_r, g=1.0, kappa=kappa), 2)
        ratio = (f_r1 - f_r0) / unit.delta_chi[0]
        g = math.sqrt(abs(ratio)) if ratio != 0 else g
        f_r = f_r0 - g**2 * unit.chi[0]
    return ResonatorModel(f_r=f_r, g=g, kappa=kappa)


def fit_harmonics(
    obs: ObservationSet,
    harmonics: int,
    seed: int = 0,
    n_starts: int = 4,
    kappa: float = DEFAULT_KAPPA,
    cutoff: int = DEFAULT_CUTOFF,
) -> FitResult:
    """Fits the M-harmonic model to the lowest M+1 transitions and f_r,|0⟩, f_r,|1⟩.

    Each start runs a Nelder-Mead simplex and is then polished with
    ``scipy.optimize.least_squares``. The first start is the standard-model
    inversion of f01 and f12; the others perturb it with a seeded generator.

    Args:
        obs: Observations; only transitions 0..M are used.
        harmonics: Number of harmonics M, 1 to 8.
        seed: Seed for the multi-start perturbations.
        n_starts: Number of starts.
        kappa: Resonator linewidth carried into the fitted resonator.
        cutoff: Charge-basis cutoff.

    Raises:
        InputError: If ``harmonics`` is out of range.
        ArityError: If a required transition or the resonator frequencies are missing.
        FitError: If no start reaches residuals below 10 kHz.
    """
    if not 1 <= harmonics <= MAX_HARMONICS:
        raise InputError(f"harmonics must be in [1, {MAX_HARMONICS}], got {harmonics}")
    if obs.resonator_freqs is None:
        raise ArityError("harmonics fit needs f_r,|0⟩ and f_r,|1⟩")
    fitted = obs.lowest(harmonics + 1)
    problem = _HarmonicsProblem(fitted, harmonics, kappa, cutoff)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        base = fit_standard(fitted.frequencies[0], fitted.frequencies[1], cutoff=cutoff).model
        resonator0 = _resonator_guess(base, *fitted.resonator_freqs, kappa)

    rng = np.random.default_rng(seed)
    e_j1 = base.e_j[0]
    theta0 = np.array(
        [math.log(base.e_c), math.log(e_j1)]
        + [math.log(e_j1 * 5e-3 * 0.1 ** (m - 1)) for m in range(1, harmonics)]
        + [resonator0.f_r, math.log(resonator0.g)]
    )
    scales = np.array([0.02, 0.02] + [0.5] * (harmonics - 1) + [2e-4, 0.05])

    best_theta, best_cost, nfev = theta0, problem.cost(theta0), 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for start in range(n_starts):
            x0 = theta0 if start == 0 else theta0 + rng.normal(0.0, 1.0, theta0.size) * scales
            simplex = np.vstack([x0] + [x0 + np.eye(x0.size)[k] * scales[k] for k in range(x0.size)])
            simplex_result = scipy.optimize.minimize(
                problem.cost,
                x0,
                method="Nelder-Mead",
                options={
                    "initial_simplex": simplex,
                    "xatol": 1e-10,
                    "fatol": 1e-16,
                    "maxfev": 2000 * x0.size,
                },
            )
            polish = scipy.optimize.least_squares(
                problem.residuals,
                simplex_result.x,
                method="lm",
                xtol=1e-15,
                ftol=1e-15,
                gtol=1e-15,
            )
            nfev += int(simplex_result.nfev) + int(polish.nfev)
            cost = problem.cost(polish.x)
            if cost < best_cost:
                best_theta, best_cost = polish.x, cost
            if math.sqrt(best_cost) < HARMONICS_TOLERANCE:
                break

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        final = problem.residuals(best_theta)
    converged = bool(np.max(np.abs(final)) < HARMONICS_TOLERANCE)

    model, resonator = problem.unpack(best_theta)
    if not converged:
        raise FitError(
            f"Harmonics fit with M={harmonics} did not reach {HARMONICS_TOLERANCE} GHz residuals.",
            best_point={**model.to_dict(), **resonator.to_dict()},
            diagnostics={"residuals": final.tolist(), "nfev": nfev, "starts": n_starts},
        )

    return FitResult(
        model=model,
        resonator=resonator,
        residuals=tuple(float(x) for x in final),
        converged=converged,
        iterations=nfev,
        observations=fitted,
        sequential_residuals=_sequential_residuals(problem, model, resonator),
        warnings=tuple(str(w.message) for w in caught),
    )


def _sequential_residuals(
    problem: _HarmonicsProblem, model: TransmonModel, resonator: ResonatorModel
) -> tuple[float, ...]:
    """Residuals with the transmon fitted first and (f_r, g) solved afterwards."""
    h = problem.harmonics
    theta = problem.pack(model, resonator)
    count = len(problem.indices)

    def transmon_residuals(transmon_theta: np.ndarray) -> np.ndarray:
        return problem.residuals(np.concatenate([transmon_theta, theta[h + 1 :]]))[:count]

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        transmon = scipy.optimize.least_squares(transmon_residuals, theta[: h + 1], method="trf", xtol=1e-15)
        stage_one, _ = problem.unpack(np.concatenate([transmon.x, theta[h + 1 :]]))
        stage_two = _resonator_guess(stage_one, *problem.targets[count:], problem.kappa)
        final = problem.residuals(problem.pack(stage_one, stage_two))
    return tuple(float(x) for x in final)


def predict_observables(fit: FitResult, levels: int) -> Prediction:
    """Predicts f_{i,i+1} and δf for transitions i = 0..levels-1.

    Fits that carry a resonator predict Lamb-shifted transitions, the
    quantity they were fitted to.

    Raises:
        InputError: If the fit did not converge or ``levels`` is below 1.
    """
    if not fit.converged:
        raise InputError("cannot predict from a fit that did not converge")
    if levels < 1:
        raise InputError(f"levels must be at least 1, got {levels}")

    if fit.resonator is None:
        transitions = eigensolve(fit.model, levels + 1).transitions()
    else:
        transitions, _ = _dressed(fit.model, fit.resonator, levels + 1)
    spreads = [delta_f(fit.model, i) for i in range(levels)]
    return Prediction(
        transitions=tuple(float(x) for x in transitions),
        delta_f=tuple(float(x) for x in spreads),
        dressed=fit.resonator is not None,
    )


def observation_residuals(fit: FitResult, obs: ObservationSet) -> np.ndarray:
    """Residuals of a harmonics fit on another observation set, e.g. one more transition.

    Ordered as ``FitResult.residuals``: transitions by index, then f_r,|0⟩ and f_r,|1⟩.

    Raises:
        InputError: If the fit has no resonator or ``obs`` no resonator frequencies.
    """
    if fit.resonator is None or obs.resonator_freqs is None:
        raise InputError("observation residuals need a fitted resonator and resonator frequencies")
    problem = _HarmonicsProblem(obs, fit.harmonics, fit.resonator.kappa, fit.model.cutoff)
    return problem.predict(problem.pack(fit.model, fit.resonator)) - problem.targets


class ModelFitter:
    """Runs parameter fits and logs their progress and warnings."""

    def __init__(
        self,
        logger: Logger,
        seed: int = 0,
        n_starts: int = 4,
        kappa: float = DEFAULT_KAPPA,
        cutoff: int = DEFAULT_CUTOFF,
    ) -> None:
        """Initializes the fitter.

        Args:
            logger: Logger for progress and forwarded warnings.
            seed: Seed for multi-start perturbations.
            n_starts: Starts per harmonics fit.
            kappa: Resonator linewidth carried into fitted resonators.
            cutoff: Charge-basis cutoff.
        """
        self._log: Logger = logger
        self._seed: int = seed
        self._n_starts: int = n_starts
        self._kappa: float = kappa
        self._cutoff: int = cutoff

    def fit_standard(self, f01: float, f12: float) -> FitResult:
        """Standard-model fit; see ``fit_standard``."""
        self._log.debug("Fitting standard model.", f01=f01, f12=f12)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            result = fit_standard(f01, f12, cutoff=self._cutoff)
        self._log.log_warnings(caught, fit="standard")
        self._log.info(
            "Fitted standard model.",
            e_j=result.model.e_j[0],
            e_c=result.model.e_c,
            iterations=result.iterations,
        )
        return result

    def fit_harmonics(self, obs: ObservationSet, harmonics: int) -> FitResult:
        """Harmonics fit; see ``fit_harmonics``."""
        self._log.debug("Fitting harmonics model.", harmonics=harmonics, observations=len(obs.indices))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            result = fit_harmonics(
                obs,
                harmonics,
                seed=self._seed,
                n_starts=self._n_starts,
                kappa=self._kappa,
                cutoff=self._cutoff,
            )
        self._log.log_warnings(caught, fit="harmonics", harmonics=harmonics)
        self._log.info(
            "Fitted harmonics model.",
            harmonics=harmonics,
            e_c=result.model.e_c,
            e_j=list(result.model.e_j),
            max_residual=result.max_residual,
            iterations=result.iterations,
        )
        return result

    def fit_harmonics_series(self, obs: ObservationSet, max_harmonics: int) -> list[FitResult]:
        """Fits M = 1..``max_harmonics``, each to its own lowest M+1 transitions.

        Each fit is also evaluated on the next model's observations; a larger
        model with a larger squared residual there is logged as a warning.
        """
        fits = [self.fit_harmonics(obs, m) for m in range(1, max_harmonics + 1)]
        for smaller, larger in zip(fits, fits[1:]):
            wider = observation_residuals(smaller, larger.observations)
            previous = float(wider @ wider)
            current = float(np.dot(larger.residuals, larger.residuals))
            if current > previous:
                self._log.warning(
                    "Larger harmonics model fits worse.",
                    harmonics=larger.harmonics,
                    squared_residual=current,
                    previous_squared_residual=previous,
                )
        return fits

    def predict_observables(self, fit: FitResult, levels: int) -> Prediction:
        """Prediction; see ``predict_observables``."""
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            prediction = predict_observables(fit, levels)
        self._log.log_warnings(caught, harmonics=fit.harmonics)
        self._log.debug("Predicted observables.", harmonics=fit.harmonics, levels=levels)
        return prediction
