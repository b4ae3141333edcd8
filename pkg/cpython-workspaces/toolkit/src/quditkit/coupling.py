"""Two-transmon ZZ shifts.

The capacitively coupled pair is written in the product of the single
transmon eigenbases,

    H = diag(E_a) ⊗ 1 + 1 ⊗ diag(E_b) + J·n̂_a ⊗ n̂_b

and diagonalized. Dressed states are labeled by their largest overlap with a
product state |i⟩⊗|j⟩. The shift of target transition i→i+1 with the control
in |j⟩ is

    Δf^{|j⟩}_{i,i+1} = [E(i+1, j) - E(i, j)] - [E(i+1, 0) - E(i, 0)]

with the target index first.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.optimize

from .errors import ApproximationValidityWarning, DegeneracyError, FitError, InputError
from .hamiltonian import EigenSolution

DEFAULT_TRUNCATION = 12
LABEL_THRESHOLD = 0.5
DISPERSIVE_RATIO = 0.1
J_BRACKET = (1e-6, 0.01)


@dataclass(frozen=True)
class JointSpectrum:
    """Dressed spectrum of a coupled transmon pair.

    Attributes:
        energies: Dressed energies in GHz, ascending.
        overlaps: overlaps[p, k] = |⟨p|k⟩|² for product index p = i·trunc + j.
        trunc: Levels kept per transmon.
        coupling: J in GHz.
    """

    energies: np.ndarray
    overlaps: np.ndarray = field(repr=False)
    trunc: int
    coupling: float

    def _product_index(self, i: int, j: int) -> int:
        if not (0 <= i < self.trunc and 0 <= j < self.trunc):
            raise IndexError(f"state ({i}, {j}) outside truncation {self.trunc}")
        return i * self.trunc + j

    def _split(self, p: int) -> tuple[int, int]:
        return divmod(int(p), self.trunc)

    def energy(self, i: int, j: int) -> float:
        """Dressed energy of the state labeled |i⟩_a|j⟩_b in GHz.

        Raises:
            DegeneracyError: If the label is ambiguous.
        """
        p = self._product_index(i, j)
        column = int(np.argmax(self.overlaps[p]))
        overlap = float(self.overlaps[p, column])
        if overlap < LABEL_THRESHOLD:
            rivals = np.argsort(self.overlaps[:, column])[::-1]
            rival = next(q for q in rivals if q != p)
            raise DegeneracyError(
                f"states {(i, j)} and {self._split(rival)} are hybridized beyond labeling",
                diagnostics={
                    "state": [i, j],
                    "colliding": list(self._split(rival)),
                    "max_overlap": overlap,
                },
            )
        return float(self.energies[column])

    def check_labels(self, levels: int) -> None:
        """Checks that every |i, j⟩ with i, j < ``levels`` has a unique dressed partner.

        Raises:
            DegeneracyError: On an ambiguous or duplicated label.
        """
        seen: dict[int, tuple[int, int]] = {}
        for i in range(levels):
            for j in range(levels):
                self.energy(i, j)
                column = int(np.argmax(self.overlaps[self._product_index(i, j)]))
                if column in seen:
                    raise DegeneracyError(
                        f"states {seen[column]} and {(i, j)} map to the same dressed state",
                        diagnostics={"state": [i, j], "colliding": list(seen[column])},
                    )
                seen[column] = (i, j)


@dataclass(frozen=True)
class ZZShiftMatrix:
    """Control-state-dependent shifts of the target transitions.

    ``shifts[i, j]`` is Δf^{|j⟩}_{i,i+1} in GHz; column 0 is zero.
    """

    shifts: np.ndarray
    control_id: str
    target_id: str
    coupling: float

    def subspace_zz(self, k: int) -> float:
        """Effective ZZ of the {|k⟩, |k+1⟩} encoding, Δf^{|k+1⟩}_{k,k+1} - Δf^{|k⟩}_{k,k+1}."""
        return float(self.shifts[k, k + 1] - self.shifts[k, k])

    def to_dict(self) -> dict:
        """Plain-dict form for reports."""
        return {
            "control": self.control_id,
            "target": self.target_id,
            "j": self.coupling,
            "shifts": self.shifts.tolist(),
        }


def build_joint(
    a: EigenSolution,
    b: EigenSolution,
    coupling: float,
    trunc: int = DEFAULT_TRUNCATION,
    check_levels: int | None = None,
) -> JointSpectrum:
    """Diagonalizes the coupled pair in the product eigenbasis.

    Args:
        a: First transmon.
        b: Second transmon.
        coupling: J in GHz.
        trunc: Levels kept per transmon.
        check_levels: If set, labels of all |i, j⟩ with i, j below it are checked.

    Raises:
        InputError: If ``trunc`` exceeds the retained levels.
        DegeneracyError: If a checked label is ambiguous.
    """
    if not 2 <= trunc <= min(a.levels, b.levels):
        raise InputError(
            f"trunc {trunc} must be within [2, {min(a.levels, b.levels)}] retained levels"
        )

    detuning = abs(a.transition(0) - b.transition(0))
    if coupling and abs(coupling) > DISPERSIVE_RATIO * detuning:
        warnings.warn(
            f"J = {coupling:.3g} GHz is not small against the {detuning:.3g} GHz detuning",
            ApproximationValidityWarning,
            stacklevel=2,
        )

    identity = np.eye(trunc)
    h = (
        np.kron(np.diag(a.energies[:trunc]), identity)
        + np.kron(identity, np.diag(b.energies[:trunc]))
        + coupling * np.kron(a.charge_operator[:trunc, :trunc], b.charge_operator[:trunc, :trunc])
    )
    energies, vectors = scipy.linalg.eigh(h)
    joint = JointSpectrum(energies=energies, overlaps=vectors**2, trunc=trunc, coupling=coupling)
    if check_levels is not None:
        joint.check_labels(check_levels)
    return joint


def zz_shift_matrix(
    joint: JointSpectrum,
    control_levels: int,
    target_transitions: int,
    target: str = "a",
    control_id: str = "b",
    target_id: str = "a",
) -> ZZShiftMatrix:
    """Tabulates Δf^{|j⟩}_{i,i+1} for control states j < ``control_levels``.

    Args:
        joint: The labeled joint spectrum.
        control_levels: Number of control states (columns).
        target_transitions: Number of target transitions (rows).
        target: Which member of the pair, "a" or "b", is the target.
        control_id: Label of the control for reports.
        target_id: Label of the target for reports.

    Raises:
        InputError: If ``target`` is not "a" or "b".
        DegeneracyError: If a needed label is ambiguous.
    """
    if target not in ("a", "b"):
        raise InputError(f"target must be 'a' or 'b', got {target!r}")

    def energy(t: int, c: int) -> float:
        return joint.energy(t, c) if target == "a" else joint.energy(c, t)

    shifts = np.zeros((target_transitions, control_levels))
    for i in range(target_transitions):
        reference = energy(i + 1, 0) - energy(i, 0)
        for j in range(1, control_levels):
            shifts[i, j] = (energy(i + 1, j) - energy(i, j)) - reference
    return ZZShiftMatrix(shifts=shifts, control_id=control_id, target_id=target_id, coupling=joint.coupling)


def fit_j_from_shift(
    a: EigenSolution,
    b: EigenSolution,
    measured: float,
    trunc: int = DEFAULT_TRUNCATION,
    target: str = "a",
    bracket: tuple[float, float] = J_BRACKET,
) -> float:
    """Finds J such that the computed Δf^{|1⟩}_{01} matches ``measured``.

    Args:
        a: First transmon.
        b: Second transmon.
        measured: Measured Δf^{|1⟩}_{01} in GHz.
        trunc: Levels kept per transmon.
        target: Which member is the target.
        bracket: Search interval for J in GHz.

    Returns:
        J in GHz.

    Raises:
        InputError: If ``measured`` is zero.
        FitError: If no root lies in the bracket.
    """
    if measured == 0:
        raise InputError("measured shift must be nonzero")

    def mismatch(coupling: float) -> float:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            joint = build_joint(a, b, coupling, trunc=trunc, check_levels=2)
        return zz_shift_matrix(joint, 2, 1, target=target).shifts[0, 1] - measured

    low, high = bracket
    f_low, f_high = mismatch(low), mismatch(high)
    if np.sign(f_low) == np.sign(f_high):
        raise FitError(
            "No coupling in the bracket reproduces the measured shift.",
            best_point={"j": low if abs(f_low) < abs(f_high) else high},
            diagnostics={"bracket": list(bracket), "mismatch": [f_low, f_high], "measured": measured},
        )
    return float(scipy.optimize.brentq(mismatch, low, high, xtol=1e-12, rtol=1e-12))
