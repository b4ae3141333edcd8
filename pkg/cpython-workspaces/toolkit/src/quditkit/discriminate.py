"""Gaussian state discrimination of multi-tone IQ records.

A ``GaussianClassifier`` holds one full-covariance Gaussian per transmon
state in the 2D-dimensional space of interleaved quadratures. Training is
supervised; an optional EM pass over the pooled records refines it with
``sklearn.mixture.GaussianMixture`` initialized from the supervised fit.
Classification is the argmax of the Gaussian log-density plus the log
mixture weight when weights are enabled; ties go to the lowest state.

**Usage:**
```python
clf = train(shot_set.records, refine_em=True)
label, log_likelihoods = classify(clf, record)
am = assignment_matrix(clf, held_out)
populations = mitigate(measured, am)
```
"""

import json
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.optimize
import scipy.special
from sklearn.exceptions import ConvergenceWarning
from sklearn.mixture import GaussianMixture
from sklearn.model_selection import StratifiedKFold

from .errors import (
    CoverageError,
    DataDegeneracyError,
    DimensionMismatchError,
    EMConvergenceWarning,
    IllConditionedWarning,
    InputError,
)
from .readout.io import stack_records
from .readout.simulation import IQRecord

FORMAT_VERSION = 1
RIDGE_SCALE = 1e-6
EM_MAX_ITER = 50
CONDITION_LIMIT = 1e6
EM_LIKELIHOOD_RTOL = 1e-9


@dataclass(frozen=True)
class GaussianClassifier:
    """Per-state Gaussians over IQ vectors.

    Attributes:
        means: Array (d, 2D) of state means.
        covariances: Array (d, 2D, 2D) of state covariances.
        states: State label of each component, ascending.
        weights: Optional mixture weights summing to 1.
    """

    means: np.ndarray
    covariances: np.ndarray
    states: tuple[int, ...]
    weights: np.ndarray | None = None

    def __post_init__(self) -> None:
        """Checks shapes, symmetry and positive definiteness.

        Raises:
            InputError: If the parameters are inconsistent.
            DataDegeneracyError: If a covariance is not positive definite.
        """
        means = np.asarray(self.means, dtype=float)
        covariances = np.asarray(self.covariances, dtype=float)
        states = tuple(int(s) for s in self.states)
        if means.ndim != 2 or len(states) < 2 or means.shape[0] != len(states):
            raise InputError("need at least two states with one mean each")
        if covariances.shape != (means.shape[0], means.shape[1], means.shape[1]):
            raise InputError(f"covariances have shape {covariances.shape}, expected {(len(states),) + means.shape[1:] * 2}")
        if list(states) != sorted(set(states)):
            raise InputError(f"states must be unique and ascending, got {states}")
        if not np.all(np.isfinite(means)):
            raise InputError("means must be finite")
        if not np.allclose(covariances, np.swapaxes(covariances, 1, 2), rtol=1e-10, atol=0):
            raise InputError("covariances must be symmetric")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "covariances", covariances)
        object.__setattr__(self, "states", states)
        if self.weights is not None:
            weights = np.asarray(self.weights, dtype=float)
            if weights.shape != (len(states),) or np.any(weights <= 0) or abs(weights.sum() - 1) > 1e-9:
                raise InputError("weights must be positive and sum to 1")
            object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "_factors", self._factorize())

    @property
    def dimension(self) -> int:
        """Record length 2D."""
        return self.means.shape[1]

    def _factorize(self) -> np.ndarray:
        factors = []
        for state, cov in zip(self.states, self.covariances):
            try:
                factors.append(scipy.linalg.cholesky(cov, lower=True))
            except np.linalg.LinAlgError as e:
                raise DataDegeneracyError(
                    f"covariance of state {state} is not positive definite",
                    diagnostics={"state": state},
                ) from e
        return np.array(factors)

    def log_likelihoods(self, values: np.ndarray) -> np.ndarray:
        """Per-state log-density (+ log weight) for each row of ``values``.

        Returns:
            Array (n, d).

        Raises:
            DimensionMismatchError: If the record length differs from the classifier's.
        """
        values = np.atleast_2d(np.asarray(values, dtype=float))
        if values.shape[1] != self.dimension:
            raise DimensionMismatchError(f"record length {values.shape[1]}, classifier expects {self.dimension}")
        out = np.empty((values.shape[0], len(self.states)))
        constant = 0.5 * self.dimension * np.log(2.0 * np.pi)
        for k, (mean, factor) in enumerate(zip(self.means, self._factors)):
            z = scipy.linalg.solve_triangular(factor, (values - mean).T, lower=True)
            out[:, k] = -0.5 * np.sum(z**2, axis=0) - np.sum(np.log(np.diag(factor))) - constant
        if self.weights is not None:
            out += np.log(self.weights)
        return out

    def predict(self, values: np.ndarray) -> np.ndarray:
        """State label for each row of ``values``."""
        return np.array(self.states)[np.argmax(self.log_likelihoods(values), axis=1)]

    def to_json(self) -> str:
        """Serializes the classifier with a format version."""
        return json.dumps(
            {
                "format_version": FORMAT_VERSION,
                "states": list(self.states),
                "means": self.means.tolist(),
                "covariances": self.covariances.tolist(),
                "weights": None if self.weights is None else self.weights.tolist(),
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "GaussianClassifier":
        """Inverse of ``to_json``.

        Raises:
            InputError: If the document is malformed or of another version.
        """
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise InputError(f"classifier file is not JSON: {e}") from e
        if data.get("format_version") != FORMAT_VERSION:
            raise InputError(f"unsupported classifier format version {data.get('format_version')}")
        try:
            return cls(
                means=np.array(data["means"]),
                covariances=np.array(data["covariances"]),
                states=tuple(data["states"]),
                weights=None if data.get("weights") is None else np.array(data["weights"]),
            )
        except KeyError as e:
            raise InputError(f"classifier file is missing {e}") from e


@dataclass(frozen=True)
class AssignmentMatrix:
    """Empirical P(assigned i | prepared j).

    Attributes:
        matrix: Array (d, d); rows are assigned states, columns prepared states.
        states: State labels.
        counts: Test records per prepared state.
    """

    matrix: np.ndarray
    states: tuple[int, ...]
    counts: tuple[int, ...]

    @property
    def fidelity(self) -> float:
        """Mean of the diagonal."""
        return float(np.mean(np.diag(self.matrix)))

    def to_dict(self) -> dict:
        """Plain-dict form for reports."""
        return {
            "states": list(self.states),
            "matrix": self.matrix.tolist(),
            "counts": list(self.counts),
            "fidelity": self.fidelity,
        }


def _ridge(cov: np.ndarray) -> np.ndarray:
    dim = cov.shape[0]
    return cov + RIDGE_SCALE * np.trace(cov) / dim * np.eye(dim)


def train(
    records: list[IQRecord],
    states: list[int] | None = None,
    refine_em: bool = False,
    shared_covariance: bool = False,
    use_weights: bool = False,
) -> GaussianClassifier:
    """Fits one Gaussian per state from labeled records.

    Covariances get a ridge of 1e-6·trace/2D on the diagonal.

    Args:
        records: Labeled records.
        states: States to model; defaults to the labels present.
        refine_em: Run at most 50 EM iterations over the pooled records. The
            refined mixture replaces the supervised one unless it lowers the
            pooled log-likelihood; either failure raises an ``EMConvergenceWarning``.
        shared_covariance: Use one pooled covariance for all states.
        use_weights: Include mixture weights from the class frequencies.

    Raises:
        CoverageError: If a state is missing or has fewer than 2D+1 records.
        DataDegeneracyError: If a covariance is singular after regularization.
    """
    values, labels = stack_records(records)
    if labels is None:
        raise CoverageError("training records must all be labeled")
    states = sorted(set(labels.tolist())) if states is None else sorted(states)
    if len(states) < 2:
        raise CoverageError(f"need at least two states, got {states}")

    dim = values.shape[1]
    means, covariances, counts = [], [], []
    for state in states:
        members = values[labels == state]
        if len(members) < 2 * dim + 1:
            raise CoverageError(
                f"state {state} has {len(members)} records; at least {2 * dim + 1} are needed"
            )
        means.append(members.mean(axis=0))
        covariances.append(np.cov(members, rowvar=False))
        counts.append(len(members))

    counts_arr = np.array(counts, dtype=float)
    if shared_covariance:
        pooled = sum((n - 1) * c for n, c in zip(counts, covariances)) / (counts_arr.sum() - len(states))
        covariances = [pooled] * len(states)
    covariances = np.array([_ridge(c) for c in covariances])
    weights = counts_arr / counts_arr.sum()

    if refine_em:
        mask = np.isin(labels, states)
        pooled = values[mask]
        start = GaussianClassifier(np.array(means), covariances, tuple(states), weights)
        ridge = float(RIDGE_SCALE * np.mean([np.trace(c) for c in covariances]) / dim)
        mixture = GaussianMixture(
            n_components=len(states),
            covariance_type="tied" if shared_covariance else "full",
            means_init=np.array(means),
            precisions_init=np.linalg.inv(covariances[0]) if shared_covariance else np.linalg.inv(covariances),
            weights_init=weights,
            max_iter=EM_MAX_ITER,
            reg_covar=ridge,
        )
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            mixture.fit(pooled)
        for w in caught:
            if not issubclass(w.category, ConvergenceWarning):
                warnings.warn_explicit(w.message, w.category, w.filename, w.lineno)
        if not mixture.converged_:
            warnings.warn(
                f"EM refinement did not converge within {EM_MAX_ITER} iterations",
                EMConvergenceWarning,
                stacklevel=2,
            )

        refined = GaussianClassifier(
            means=mixture.means_,
            covariances=np.repeat(mixture.covariances_[None], len(states), axis=0)
            if shared_covariance
            else mixture.covariances_,
            states=tuple(states),
            weights=mixture.weights_,
        )
        before = _total_log_likelihood(start, pooled)
        after = _total_log_likelihood(refined, pooled)
        if after < before - EM_LIKELIHOOD_RTOL * abs(before):
            warnings.warn(
                f"EM refinement lowered the log-likelihood from {before:.6g} to {after:.6g}; "
                "keeping the supervised fit",
                EMConvergenceWarning,
                stacklevel=2,
            )
        else:
            means, covariances, weights = refined.means, refined.covariances, refined.weights

    return GaussianClassifier(
        means=np.array(means),
        covariances=np.array(covariances),
        states=tuple(states),
        weights=weights if use_weights else None,
    )


def classify(clf: GaussianClassifier, record: IQRecord) -> tuple[int, np.ndarray]:
    """Assigns ``record`` to a state.

    Returns:
        The state label and the per-state log-likelihoods.

    Raises:
        DimensionMismatchError: If the record length differs from the classifier's.
    """
    log_likelihoods = clf.log_likelihoods(record.values)[0]
    return clf.states[int(np.argmax(log_likelihoods))], log_likelihoods


def assignment_matrix(clf: GaussianClassifier, records: list[IQRecord]) -> AssignmentMatrix:
    """Builds P(assigned i | prepared j) from labeled test records.

    Raises:
        CoverageError: If a state has no test records or a record is unlabeled.
        InputError: If a record is labeled with an unknown state.
    """
    values, labels = stack_records(records)
    if labels is None:
        raise CoverageError("test records must all be labeled")
    unknown = set(labels.tolist()) - set(clf.states)
    if unknown:
        raise InputError(f"test records carry unknown states {sorted(unknown)}")

    index = {state: k for k, state in enumerate(clf.states)}
    assigned = np.array([index[s] for s in clf.predict(values)])
    prepared = np.array([index[s] for s in labels.tolist()])

    d = len(clf.states)
    counts = np.bincount(prepared, minlength=d)
    empty = [clf.states[k] for k in range(d) if counts[k] == 0]
    if empty:
        raise CoverageError(f"no test records for states {empty}")

    matrix = np.zeros((d, d))
    np.add.at(matrix, (assigned, prepared), 1.0)
    return AssignmentMatrix(matrix=matrix / counts, states=clf.states, counts=tuple(int(c) for c in counts))


def mitigate(measured, am: AssignmentMatrix) -> np.ndarray:
    """Corrects measured populations with the assignment matrix.

    Solves min ||M·p - measured||² subject to p >= 0 and Σp = 1 with SLSQP.

    Raises:
        DimensionMismatchError: If the population vector length differs from the matrix size.
    """
    measured = np.asarray(measured, dtype=float)
    matrix = am.matrix
    if measured.shape != (matrix.shape[0],):
        raise DimensionMismatchError(f"{measured.size} populations for a {matrix.shape[0]}-state matrix")
    total = measured.sum()
    if total > 0:
        measured = measured / total

    condition = np.linalg.cond(matrix)
    if condition > CONDITION_LIMIT:
        warnings.warn(
            f"assignment matrix condition number {condition:.3g} exceeds {CONDITION_LIMIT:.0e}",
            IllConditionedWarning,
            stacklevel=2,
        )

    d = matrix.shape[0]
    x0, *_ = np.linalg.lstsq(matrix, measured, rcond=None)
    x0 = np.clip(x0, 0.0, None)
    x0 = x0 / x0.sum() if x0.sum() > 0 else np.full(d, 1.0 / d)

    result = scipy.optimize.minimize(
        lambda p: float(np.sum((matrix @ p - measured) ** 2)),
        x0,
        jac=lambda p: 2.0 * matrix.T @ (matrix @ p - measured),
        method="SLSQP",
        bounds=[(0.0, 1.0)] * d,
        constraints=[{"type": "eq", "fun": lambda p: np.sum(p) - 1.0, "jac": lambda p: np.ones_like(p)}],
        options={"ftol": 1e-14, "maxiter": 500},
    )
    populations = np.clip(result.x, 0.0, None)
    return populations / populations.sum()


def mixture_log_likelihood(clf: GaussianClassifier, records: list[IQRecord]) -> float:
    """Total log-likelihood of ``records`` under the mixture; uniform weights if none are set."""
    values, _ = stack_records(records)
    return _total_log_likelihood(clf, values)


def _total_log_likelihood(clf: GaussianClassifier, values: np.ndarray) -> float:
    log_likelihoods = clf.log_likelihoods(values)
    if clf.weights is None:
        log_likelihoods = log_likelihoods - np.log(len(clf.states))
    return float(np.sum(scipy.special.logsumexp(log_likelihoods, axis=1)))


def cross_validate(records: list[IQRecord], folds: int = 5, seed: int = 0, **train_kwargs) -> list[float]:
    """Stratified k-fold assignment fidelities.

    Args:
        records: Labeled records.
        folds: Number of folds.
        seed: Shuffle seed.
        **train_kwargs: Forwarded to ``train``.

    Returns:
        Fidelity of each fold.
    """
    records = list(records)
    _, labels = stack_records(records)
    if labels is None:
        raise CoverageError("cross-validation records must all be labeled")
    splitter = StratifiedKFold(n_splits=folds, shuffle=True, random_state=seed)
    fidelities = []
    for train_index, test_index in splitter.split(np.zeros(len(labels)), labels):
        clf = train([records[i] for i in train_index], **train_kwargs)
        fidelities.append(assignment_matrix(clf, [records[i] for i in test_index]).fidelity)
    return fidelities
