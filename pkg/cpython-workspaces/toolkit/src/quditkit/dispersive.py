"""Transmon-resonator dispersive quantities.

Second-order Schrieffer-Wolff shifts are

    χ_ii' = g²|⟨i|n̂|i'⟩|² / (f_i - f_i' - f_r)
    f̃_i = f_i + Σ_i' χ_ii'
    χ_i = Σ_i' (χ_ii' - χ_i'i)

so that the resonator sits at f_r + χ_i when the transmon is in |i⟩.
``dressed_oracle`` diagonalizes the joint transmon-resonator Hamiltonian
exactly for cross-checks. Its coupling i·g·n̂(a† - a) is rotated by the
photon-number gauge a → i·a into g·n̂(a + a†) so all matrices stay real.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    ConvergenceError,
    DegeneracyError,
    DispersiveBreakdownWarning,
    InputError,
    InvalidModelError,
)
from .hamiltonian import EigenSolution, TransmonModel, eigensolve

WINDOW_PADDING = 5
TAIL_TOLERANCE = 1e-6
LABEL_THRESHOLD = 0.5


@dataclass(frozen=True)
class ResonatorModel:
    """A readout resonator coupled to one transmon.

    Attributes:
        f_r: Bare resonator frequency in GHz.
        g: Coupling strength in GHz.
        kappa: Total linewidth κ/2π in GHz.
        kappa_split: Optional (internal, coupling) linewidths in GHz.
    """

    f_r: float
    g: float
    kappa: float
    kappa_split: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        """Checks invariants.

        Raises:
            InvalidModelError: If a field is out of range.
        """
        if not math.isfinite(self.f_r) or self.f_r <= 0:
            raise InvalidModelError(f"f_r must be positive, got {self.f_r}")
        if not math.isfinite(self.g):
            raise InvalidModelError(f"g must be finite, got {self.g}")
        if not math.isfinite(self.kappa) or self.kappa <= 0:
            raise InvalidModelError(f"kappa must be positive, got {self.kappa}")
        if self.kappa_split is not None:
            split = tuple(float(x) for x in self.kappa_split)
            if len(split) != 2 or min(split) < 0:
                raise InvalidModelError(f"kappa_split must be two non-negative values, got {split}")
            if abs(sum(split) - self.kappa) > 1e-9:
                raise InvalidModelError(
                    f"kappa_split {split} does not sum to kappa {self.kappa}"
                )
            object.__setattr__(self, "kappa_split", split)

    def _quality(self, index: int) -> float | None:
        if self.kappa_split is None or self.kappa_split[index] == 0:
            return None
        return self.f_r / self.kappa_split[index]

    @property
    def internal_q(self) -> float | None:
        """Internal quality factor f_r/κ_i, if the split is known."""
        return self._quality(0)

    @property
    def coupling_q(self) -> float | None:
        """Coupling quality factor f_r/κ_c, if the split is known."""
        return self._quality(1)

    @property
    def is_undercoupled(self) -> bool | None:
        """True when internal loss dominates (Q_i < Q_c)."""
        if self.kappa_split is None:
            return None
        internal, coupling = self.kappa_split
        return internal > coupling

    def to_dict(self) -> dict:
        """Plain-dict form used by device files and reports."""
        data = {"f_r": self.f_r, "g": self.g, "kappa": self.kappa}
        if self.kappa_split is not None:
            data["kappa_split"] = list(self.kappa_split)
        return data


@dataclass(frozen=True)
class DispersiveReport:
    """Per-level dispersive shifts.

    Attributes:
        chi: χ_i in GHz.
        lamb: Lamb-shifted transmon energies f̃_i in GHz.
        delta_chi: χ_i - χ_{i-1} for i >= 1.
        window: Number of transmon levels the sums ran over.
        tail_bound: Largest contribution of the two topmost window levels, in GHz.
        warnings: Messages of warnings raised while building the report.
    """

    chi: tuple[float, ...]
    lamb: tuple[float, ...]
    delta_chi: tuple[float, ...]
    window: int
    tail_bound: float
    warnings: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        """Plain-dict form for reports."""
        return {
            "chi": list(self.chi),
            "lamb": list(self.lamb),
            "delta_chi": list(self.delta_chi),
            "window": self.window,
            "tail_bound": self.tail_bound,
            "warnings": list(self.warnings),
        }


def _warn_breakdown(i: int, ip: int, denominator: float, kappa: float) -> None:
    warnings.warn(
        f"transition {i}->{ip} is {abs(denominator):.3g} GHz from the resonator, "
        f"inside the linewidth {kappa:.3g} GHz",
        DispersiveBreakdownWarning,
        stacklevel=3,
    )


def chi_pairwise(sol: EigenSolution, res: ResonatorModel, i: int, ip: int) -> float:
    """Returns χ_ii' in GHz.

    Raises:
        IndexError: If a level is not retained.
    """
    if not (0 <= i < sol.levels and 0 <= ip < sol.levels):
        raise IndexError(f"levels ({i}, {ip}) outside the {sol.levels} retained")
    if res.g == 0:
        return 0.0
    denominator = float(sol.energies[i] - sol.energies[ip] - res.f_r)
    if abs(denominator) < res.kappa:
        _warn_breakdown(i, ip, denominator, res.kappa)
    return res.g**2 * float(sol.charge_operator[i, ip]) ** 2 / denominator


def _chi_matrix(sol: EigenSolution, res: ResonatorModel, window: int) -> np.ndarray:
    energies = sol.energies[:window]
    n = sol.charge_operator[:window, :window]
    denominators = energies[:, None] - energies[None, :] - res.f_r
    return res.g**2 * n**2 / denominators


def stark_and_lamb(
    sol: EigenSolution,
    res: ResonatorModel,
    levels: int,
    window: int | None = None,
) -> DispersiveReport:
    """Computes χ_i, f̃_i and Δχ_i for the lowest ``levels`` transmon levels.

    The sums run over ``levels + 5`` transmon levels. If the two topmost
    levels of that window still contribute more than 1 kHz, the window is
    widened by re-solving the model until the basis is exhausted. A fixed
    ``window`` skips the widening, so every χ_i scales exactly as g².

    Args:
        sol: Eigen-solution of the transmon.
        res: The resonator.
        levels: Number of levels to report.
        window: Transmon levels to sum over; adaptive when None.

    Returns:
        The dispersive report.

    Raises:
        InputError: If ``levels`` is below 1 or ``window`` is out of range.
        ConvergenceError: If the tail bound cannot be met within the basis.
    """
    if levels < 1:
        raise InputError(f"levels must be at least 1, got {levels}")
    fixed = window is not None
    if fixed and not levels < window <= sol.model.dimension:
        raise InputError(f"window must exceed levels={levels} and fit the basis, got {window}")

    model = sol.model
    window = window if fixed else levels + WINDOW_PADDING
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        while True:
            if window > model.dimension:
                raise ConvergenceError(
                    "Dispersive sums do not converge within the charge basis.",
                    diagnostics={"window": window, "dimension": model.dimension, "levels": levels},
                )
            if sol.levels < window:
                sol = eigensolve(model, window)

            chi_mat = _chi_matrix(sol, res, window)
            tail = np.abs(chi_mat[:levels, window - 2 :]) + np.abs(chi_mat[window - 2 :, :levels]).T
            tail_bound = float(tail.max())
            if fixed or tail_bound <= TAIL_TOLERANCE:
                break
            window += WINDOW_PADDING

        if res.g != 0:
            energies = sol.energies[:window]
            n = sol.charge_operator[:window, :window]
            denominators = energies[:levels, None] - energies[None, :window] - res.f_r
            close = (np.abs(denominators) < res.kappa) & (n[:levels, :] != 0)
            for i, ip in zip(*np.nonzero(close)):
                _warn_breakdown(int(i), int(ip), float(denominators[i, ip]), res.kappa)

    for w in caught:
        warnings.warn_explicit(w.message, w.category, w.filename, w.lineno)

    chi = chi_mat.sum(axis=1) - chi_mat.sum(axis=0)
    lamb = sol.energies[:window] + chi_mat.sum(axis=1)
    return DispersiveReport(
        chi=tuple(float(x) for x in chi[:levels]),
        lamb=tuple(float(x) for x in lamb[:levels]),
        delta_chi=tuple(float(x) for x in np.diff(chi[:levels])),
        window=window,
        tail_bound=tail_bound,
        warnings=tuple(str(w.message) for w in caught),
    )


@dataclass(frozen=True)
class DressedSpectrum:
    """Exact joint transmon-resonator eigenstates.

    Labels are resolved on demand: the dressed state for bare |i, k⟩ is the
    eigenvector with the largest overlap, and it must exceed 0.5.
    """

    energies: np.ndarray
    overlaps: np.ndarray = field(repr=False)
    n_transmon: int
    n_photon: int

    def _bare_index(self, i: int, k: int) -> int:
        if not (0 <= i < self.n_transmon and 0 <= k <= self.n_photon):
            raise IndexError(f"state ({i}, {k}) outside the truncation")
        return i * (self.n_photon + 1) + k

    def energy(self, i: int, k: int) -> float:
        """Dressed energy of the state labeled |i, k photons⟩ in GHz.

        Raises:
            DegeneracyError: If no eigenstate overlaps |i, k⟩ by at least 0.5.
        """
        bare = self._bare_index(i, k)
        column = int(np.argmax(self.overlaps[bare]))
        overlap = float(self.overlaps[bare, column])
        if overlap < LABEL_THRESHOLD:
            raise DegeneracyError(
                f"state |{i},{k}⟩ has no dressed partner above overlap {LABEL_THRESHOLD}",
                diagnostics={"state": [i, k], "max_overlap": overlap},
            )
        return float(self.energies[column])

    def pull(self, i: int) -> float:
        """Resonator frequency with the transmon in |i⟩, E(i,1) - E(i,0)."""
        return self.energy(i, 1) - self.energy(i, 0)


def dressed_oracle(
    model: TransmonModel,
    res: ResonatorModel,
    n_transmon: int,
    n_photon: int,
) -> DressedSpectrum:
    """Diagonalizes the joint transmon-resonator Hamiltonian.

    H = diag(E_i) ⊗ 1 + 1 ⊗ f_r·a†a + g·n̂ ⊗ (a + a†), with ``n_transmon``
    transmon levels and photon numbers 0..``n_photon``.

    Raises:
        InputError: If a truncation is too small.
    """
    if n_transmon < 2:
        raise InputError(f"n_transmon must be at least 2, got {n_transmon}")
    if n_photon < 2:
        raise InputError(f"n_photon must be at least 2, got {n_photon}")

    sol = eigensolve(model, n_transmon)
    photons = np.arange(n_photon + 1, dtype=float)
    a = np.diag(np.sqrt(photons[1:]), k=1)

    h = (
        np.kron(np.diag(sol.energies), np.eye(n_photon + 1))
        + np.kron(np.eye(n_transmon), np.diag(res.f_r * photons))
        + res.g * np.kron(sol.charge_operator, a + a.T)
    )
    energies, vectors = scipy.linalg.eigh(h)
    return DressedSpectrum(
        energies=energies,
        overlaps=vectors**2,
        n_transmon=n_transmon,
        n_photon=n_photon,
    )
