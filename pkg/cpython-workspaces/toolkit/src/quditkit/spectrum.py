"""Derived spectral quantities of a transmon.

Transition frequencies, anharmonicities, the number of levels confined in
the cosine well and the charge dispersion of each level. The exact charge
dispersion is ε_m = E_m(n_g = ½) - E_m(n_g = 0), obtained from two
diagonalizations; the asymptotic form is the large-E_J/E_C expansion

    ε_m ≈ (-1)^m E_C 2^(4m+5)/m! √(2/π) (E_J/2E_C)^(m/2+3/4) e^(-√(8E_J/E_C))

evaluated in log space. Its leading relative correction is
(6m² + 14m + 7)/(32√(E_J/2E_C)), so it overestimates |ε_m| for levels
approaching the top of the well.

The exact form differences eigenvalues of size ‖H‖, so it cannot resolve
|ε_m| below roughly machine epsilon · ‖H‖ · dim. Values under that floor
are noise and raise a ``PrecisionFloorWarning``; deep in the transmon
regime this covers the lowest levels.
"""

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    AsymptoticValidityWarning,
    DegenerateLevelWarning,
    InputError,
    InvalidModelError,
    PrecisionFloorWarning,
)
from .hamiltonian import DEFAULT_CUTOFF, EigenSolution, TransmonModel, eigensolve

ASYMPTOTIC_MIN_RATIO = 20.0
ASYMPTOTIC_TOLERANCE = 0.25
DEGENERACY_GAP = 1e-6


@dataclass(frozen=True)
class SpectrumReport:
    """Transitions and anharmonicities of one eigen-solution.

    Attributes:
        transitions: f_{i,i+1} in GHz.
        anharmonicities: α_i = f_{i,i+1} - f_{i-1,i} in GHz, starting at i = 1.
        n_levels: Levels confined in the well.
        dispersion: ε_m in GHz for every retained level, when requested.
        dispersion_resolved: Per level, whether |ε_m| is above ``dispersion_floor``.
        warnings: Messages of warnings raised while building the report.
    """

    transitions: tuple[float, ...]
    anharmonicities: tuple[float, ...]
    n_levels: int
    dispersion: tuple[float, ...] | None = None
    dispersion_resolved: tuple[bool, ...] | None = None
    warnings: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        """Plain-dict form for reports."""
        return {
            "transitions": list(self.transitions),
            "anharmonicities": list(self.anharmonicities),
            "n_levels": self.n_levels,
            "dispersion": None if self.dispersion is None else list(self.dispersion),
            "dispersion_resolved": None
            if self.dispersion_resolved is None
            else list(self.dispersion_resolved),
            "warnings": list(self.warnings),
        }


class ApproxSpectrum(NamedTuple):
    """Closed-form f01, α and f01/|α|."""

    f01: float
    alpha: float
    ratio: float


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise InputError(f"{name} must be positive, got {value}")


def transitions_and_anharmonicities(sol: EigenSolution, with_dispersion: bool = False) -> SpectrumReport:
    """Builds the spectrum report of ``sol``.

    Args:
        sol: An eigen-solution with at least three levels.
        with_dispersion: Also compute the exact charge dispersion per level.

    Returns:
        The report.

    Raises:
        InputError: If fewer than three levels are retained.
    """
    if sol.levels < 3:
        raise InputError(f"need at least 3 levels, got {sol.levels}")

    transitions = sol.transitions()
    anharmonicities = np.diff(transitions)
    model = sol.model

    dispersion = resolved = None
    caught: list[warnings.WarningMessage] = []
    if with_dispersion:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            dispersion = tuple(charge_dispersion_exact(model, m) for m in range(sol.levels))
        floor = dispersion_floor(model)
        resolved = tuple(abs(eps) > floor for eps in dispersion)
        for w in caught:
            warnings.warn_explicit(w.message, w.category, w.filename, w.lineno)

    return SpectrumReport(
        transitions=tuple(float(x) for x in transitions),
        anharmonicities=tuple(float(x) for x in anharmonicities),
        n_levels=n_levels(model.e_j[0], model.e_c) if model.e_j[0] > 0 else 0,
        dispersion=dispersion,
        dispersion_resolved=resolved,
        warnings=tuple(str(w.message) for w in caught),
    )


def approx_f01_alpha(e_j: float, e_c: float) -> ApproxSpectrum:
    """Closed-form transmon estimates f01 = √(8E_J E_C) - E_C and α = -E_C.

    Raises:
        InputError: If either energy is not positive.
    """
    _require_positive(e_j=e_j, e_c=e_c)
    return ApproxSpectrum(
        f01=math.sqrt(8.0 * e_j * e_c) - e_c,
        alpha=-e_c,
        ratio=math.sqrt(8.0 * e_j / e_c),
    )


def n_levels(e_j: float, e_c: float) -> int:
    """Number of levels confined in the cosine well, ⌊√(E_J/2E_C)⌋.

    Raises:
        InputError: If either energy is not positive.
    """
    _require_positive(e_j=e_j, e_c=e_c)
    return math.floor(math.sqrt(e_j / (2.0 * e_c)))


def _warn_if_degenerate(energies: np.ndarray, m: int, n_g: float) -> None:
    gaps = []
    if m > 0:
        gaps.append(energies[m] - energies[m - 1])
    if m + 1 < len(energies):
        gaps.append(energies[m + 1] - energies[m])
    if gaps and min(gaps) < DEGENERACY_GAP:
        warnings.warn(
            f"level {m} is within {DEGENERACY_GAP} GHz of a neighbour at n_g={n_g}; "
            "ordering follows ascending energy",
            DegenerateLevelWarning,
            stacklevel=3,
        )


def dispersion_floor(model: TransmonModel) -> float:
    """Smallest |ε_m| in GHz that ``charge_dispersion_exact`` resolves for ``model``.

    Machine epsilon times the Gershgorin bound on ‖H‖ at n_g = ½ times the
    basis dimension.
    """
    norm = 4.0 * model.e_c * (model.cutoff + 0.5) ** 2 + sum(abs(e_jm) for e_jm in model.e_j)
    return float(np.finfo(float).eps * norm * model.dimension)


def charge_dispersion_exact(model: TransmonModel, m: int) -> float:
    """Returns ε_m = E_m(½) - E_m(0) in GHz.

    The offset charge of ``model`` is ignored. Levels are taken in ascending
    order at each offset; near-degenerate neighbours raise a
    ``DegenerateLevelWarning`` and a result at or below ``dispersion_floor``
    raises a ``PrecisionFloorWarning``.

    Raises:
        InvalidModelError: If level ``m`` is outside the basis.
    """
    if not 0 <= m < model.dimension:
        raise InvalidModelError(f"level {m} outside a basis of dimension {model.dimension}")

    keep = min(m + 2, model.dimension)
    energies = {}
    for n_g in (0.0, 0.5):
        energies[n_g] = eigensolve(model.replace(n_g=n_g), keep).energies
        _warn_if_degenerate(energies[n_g], m, n_g)
    epsilon = float(energies[0.5][m] - energies[0.0][m])
    floor = dispersion_floor(model)
    if abs(epsilon) <= floor:
        warnings.warn(
            f"charge dispersion of level {m} is below the precision floor {floor:.3g} GHz",
            PrecisionFloorWarning,
            stacklevel=2,
        )
    return epsilon


def asymptotic_relative_error(e_j: float, e_c: float, m: int) -> float:
    """Leading relative correction (6m² + 14m + 7)/(32√(E_J/2E_C)) to the asymptotic ε_m.

    Raises:
        InputError: If an energy is not positive or ``m`` is negative.
    """
    _require_positive(e_j=e_j, e_c=e_c)
    if m < 0:
        raise InputError(f"level must be non-negative, got {m}")
    return (6 * m * m + 14 * m + 7) / (32.0 * math.sqrt(e_j / (2.0 * e_c)))


def charge_dispersion_asymptotic(e_j: float, e_c: float, m: int) -> float:
    """Asymptotic charge dispersion ε_m in GHz.

    Warns with ``AsymptoticValidityWarning`` below E_J/E_C = 20 or when
    ``asymptotic_relative_error`` exceeds 25%.
    """
    error = asymptotic_relative_error(e_j, e_c, m)
    ratio = e_j / e_c
    if ratio < ASYMPTOTIC_MIN_RATIO:
        warnings.warn(
            f"E_J/E_C = {ratio:.3g} is below {ASYMPTOTIC_MIN_RATIO}; asymptotic dispersion is unreliable",
            AsymptoticValidityWarning,
            stacklevel=2,
        )
    elif error > ASYMPTOTIC_TOLERANCE:
        warnings.warn(
            f"asymptotic dispersion of level {m} is off by about {error:.0%} at E_J/E_C = {ratio:.3g}",
            AsymptoticValidityWarning,
            stacklevel=2,
        )

    log_magnitude = (
        math.log(e_c)
        + (4 * m + 5) * math.log(2.0)
        - math.lgamma(m + 1)
        + 0.5 * math.log(2.0 / math.pi)
        + (m / 2.0 + 0.75) * math.log(ratio / 2.0)
        - math.sqrt(8.0 * ratio)
    )
    return (-1) ** m * math.exp(log_magnitude)


def delta_f(model: TransmonModel, m: int) -> float:
    """Frequency fluctuation |ε_m| + |ε_{m+1}| of transition m↔m+1 in GHz."""
    return abs(charge_dispersion_exact(model, m)) + abs(charge_dispersion_exact(model, m + 1))


def spectrum_vs_ratio(
    e_c: float,
    ratios,
    levels: int,
    cutoff: int = DEFAULT_CUTOFF,
) -> np.ndarray:
    """Transition frequencies over a sweep of E_J/E_C at fixed E_C.

    Args:
        e_c: Charging energy in GHz.
        ratios: E_J/E_C values.
        levels: Levels to solve; ``levels - 1`` transitions are returned.
        cutoff: Charge-basis cutoff.

    Returns:
        Array of shape (len(ratios), levels - 1) in GHz.
    """
    _require_positive(e_c=e_c)
    if levels < 2:
        raise InputError(f"need at least 2 levels, got {levels}")
    rows = [
        eigensolve(TransmonModel.standard(ratio * e_c, e_c, cutoff=cutoff), levels).transitions()
        for ratio in np.atleast_1d(ratios)
    ]
    return np.vstack(rows)
