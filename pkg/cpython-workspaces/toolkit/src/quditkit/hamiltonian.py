"""Single-transmon Hamiltonians in the truncated charge basis.

A transmon is described by its charging energy E_C, one or more Josephson
harmonics E_J1..E_JM and an offset charge n_g. In the charge basis
|n⟩, n = -N..N, the Hamiltonian is

    H = Σ_n 4·E_C·(n - n_g)²|n⟩⟨n| - Σ_m (E_Jm/2)·Σ_n (|n⟩⟨n+m| + |n+m⟩⟨n|)

which is real symmetric, so it is diagonalized with ``scipy.linalg.eigh``.
All energies are E/h in GHz.

**Usage:**
```python
model = TransmonModel(e_c=0.099, e_j=(32.191,))
sol = eigensolve(model, levels=12)
sol.transition(0)                 # f01 in GHz
charge_matrix_element(sol, 0, 1)  # ⟨0|n̂|1⟩
```
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, InputError, InvalidModelError, NumericalError

DEFAULT_CUTOFF = 40
MAX_CUTOFF = 200
RESIDUAL_TOLERANCE = 1e-9


def charge_states(cutoff: int) -> np.ndarray:
    """Returns the charge numbers -N..N spanned by a basis with cutoff N."""
    return np.arange(-cutoff, cutoff + 1, dtype=float)


@dataclass(frozen=True)
class TransmonModel:
    """The circuit parameters of one transmon.

    Attributes:
        e_c: Charging energy E_C/h in GHz.
        e_j: Signed Josephson harmonics (E_J1, ..., E_JM)/h in GHz.
        n_g: Dimensionless offset charge.
        cutoff: Charge-basis cutoff N.
        alternating: When set, harmonics must alternate in sign starting positive.
    """

    e_c: float
    e_j: tuple[float, ...]
    n_g: float = 0.0
    cutoff: int = DEFAULT_CUTOFF
    alternating: bool = False

    def __post_init__(self) -> None:
        """Normalizes the harmonics to a float tuple and checks invariants.

        Raises:
            InvalidModelError: If any invariant is violated.
        """
        e_j = tuple(float(x) for x in np.atleast_1d(np.asarray(self.e_j, dtype=float)))
        object.__setattr__(self, "e_j", e_j)
        object.__setattr__(self, "e_c", float(self.e_c))
        object.__setattr__(self, "n_g", float(self.n_g))

        if not math.isfinite(self.e_c) or self.e_c <= 0:
            raise InvalidModelError(f"e_c must be positive, got {self.e_c}")
        if not e_j:
            raise InvalidModelError("e_j must hold at least one harmonic")
        if not all(math.isfinite(x) for x in e_j):
            raise InvalidModelError(f"e_j must be finite, got {e_j}")
        if e_j[0] < 0:
            raise InvalidModelError(f"e_j[0] must be non-negative, got {e_j[0]}")
        if int(self.cutoff) != self.cutoff or self.cutoff < 0:
            raise InvalidModelError(f"cutoff must be a non-negative integer, got {self.cutoff}")
        if self.alternating:
            for m, value in enumerate(e_j):
                if value != 0 and np.sign(value) != (-1) ** m:
                    raise InvalidModelError(
                        f"harmonic E_J{m + 1} = {value} breaks sign alternation"
                    )

    @classmethod
    def standard(cls, e_j: float, e_c: float, n_g: float = 0.0, cutoff: int = DEFAULT_CUTOFF) -> TransmonModel:
        """Builds the single-harmonic model with E_J and E_C."""
        return cls(e_c=e_c, e_j=(e_j,), n_g=n_g, cutoff=cutoff)

    @property
    def harmonics(self) -> int:
        """Number of Josephson harmonics M."""
        return len(self.e_j)

    @property
    def dimension(self) -> int:
        """Size 2N+1 of the charge basis."""
        return 2 * self.cutoff + 1

    @property
    def ratio(self) -> float:
        """E_J1/E_C."""
        return self.e_j[0] / self.e_c

    def replace(self, **changes) -> TransmonModel:
        """Returns a copy with the given fields changed."""
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        """Plain-dict form used by device files and reports."""
        return {
            "e_c": self.e_c,
            "e_j": list(self.e_j),
            "n_g": self.n_g,
            "cutoff": self.cutoff,
            "alternating": self.alternating,
        }

    @classmethod
    def from_dict(cls, data: dict) -> TransmonModel:
        """Inverse of ``to_dict``."""
        return cls(
            e_c=data["e_c"],
            e_j=tuple(data["e_j"]),
            n_g=data.get("n_g", 0.0),
            cutoff=data.get("cutoff", DEFAULT_CUTOFF),
            alternating=data.get("alternating", False),
        )


@dataclass(frozen=True)
class EigenSolution:
    """Lowest eigenpairs of a transmon Hamiltonian.

    Attributes:
        energies: Eigenenergies E_k/h in GHz, ascending.
        vectors: Column k is the charge-basis eigenvector of level k.
        model: The model that was diagonalized.
    """

    energies: np.ndarray
    vectors: np.ndarray
    model: TransmonModel

    def __post_init__(self) -> None:
        """Freezes the arrays."""
        energies = np.array(self.energies, dtype=float)
        vectors = np.array(self.vectors, dtype=float)
        energies.flags.writeable = False
        vectors.flags.writeable = False
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "vectors", vectors)

    @property
    def levels(self) -> int:
        """Number of retained levels."""
        return len(self.energies)

    def transition(self, i: int) -> float:
        """Frequency f_{i,i+1} in GHz."""
        return float(self.energies[i + 1] - self.energies[i])

    def transitions(self) -> np.ndarray:
        """All adjacent-level transition frequencies."""
        return np.diff(self.energies)

    @cached_property
    def charge_operator(self) -> np.ndarray:
        """The charge operator n̂ in the retained eigenbasis."""
        n = charge_states(self.model.cutoff)
        op = self.vectors.T @ (n[:, None] * self.vectors)
        op.flags.writeable = False
        return op


def build_hamiltonian(model: TransmonModel) -> np.ndarray:
    """Builds the charge-basis Hamiltonian of ``model``.

    Args:
        model: The transmon model.

    Returns:
        The (2N+1)×(2N+1) real symmetric matrix in GHz.

    Raises:
        InvalidModelError: If the cutoff is smaller than the highest harmonic order.
    """
    if model.cutoff < model.harmonics:
        raise InvalidModelError(
            f"cutoff {model.cutoff} is below the highest harmonic order {model.harmonics}"
        )

    n = charge_states(model.cutoff)
    dim = model.dimension
    h = np.diag(4.0 * model.e_c * (n - model.n_g) ** 2)
    for m, e_jm in enumerate(model.e_j, start=1):
        band = np.full(dim - m, -0.5 * e_jm)
        h += np.diag(band, k=m) + np.diag(band, k=-m)
    return h


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Makes the largest-magnitude component of every column positive.

    Ties within 1e-8 relative go to the lowest charge index.
    """
    mags = np.abs(vectors)
    dominant = np.argmax(mags >= mags.max(axis=0) * (1.0 - 1e-8), axis=0)
    signs = np.sign(vectors[dominant, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def eigensolve(model: TransmonModel, levels: int) -> EigenSolution:
    """Diagonalizes ``model`` and keeps the lowest ``levels`` eigenpairs.

    Args:
        model: The transmon model.
        levels: Number of eigenpairs to keep.

    Returns:
        The eigen-solution with sign-fixed eigenvectors.

    Raises:
        InvalidModelError: If more levels are requested than the basis holds.
        NumericalError: If the eigensolver fails or the residual check fails.
    """
    if not 1 <= levels <= model.dimension:
        raise InvalidModelError(
            f"requested {levels} levels from a basis of dimension {model.dimension}"
        )

    h = build_hamiltonian(model)
    try:
        energies, vectors = scipy.linalg.eigh(h, subset_by_index=[0, levels - 1])
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericalError(
            "Symmetric eigensolver did not converge.",
            diagnostics={"dimension": model.dimension, "levels": levels, "reason": str(e)},
        ) from e

    vectors = _fix_signs(vectors)

    h_norm = np.linalg.norm(h, 2)
    residuals = np.linalg.norm(h @ vectors - vectors * energies, axis=0)
    if np.any(residuals > RESIDUAL_TOLERANCE * h_norm):
        raise NumericalError(
            "Eigenpair residual exceeds tolerance.",
            diagnostics={
                "max_residual": float(residuals.max()),
                "norm": float(h_norm),
                "levels": levels,
            },
        )

    return EigenSolution(energies=energies, vectors=vectors, model=model)


def charge_matrix_element(sol: EigenSolution, i: int, j: int) -> float:
    """Returns ⟨i|n̂|j⟩ = Σ_n n·v_i(n)·v_j(n).

    Args:
        sol: The eigen-solution.
        i: Bra level.
        j: Ket level.

    Raises:
        IndexError: If a level is not retained.
    """
    if not (0 <= i < sol.levels and 0 <= j < sol.levels):
        raise IndexError(f"levels ({i}, {j}) outside the {sol.levels} retained")
    return float(sol.charge_operator[i, j])


def convergence_check(
    model: TransmonModel,
    levels: int,
    tol: float,
    step: int = 10,
    ceiling: int = MAX_CUTOFF,
) -> int:
    """Finds the smallest cutoff whose lowest energies are converged.

    A cutoff N is adequate when every retained energy moves by less than
    ``tol`` as N grows to N + ``step``.

    Args:
        model: The model; its own cutoff is ignored.
        levels: Number of levels that must be converged.
        tol: Tolerance in GHz.
        step: Cutoff increment used for the comparison.
        ceiling: Largest cutoff tried.

    Returns:
        The minimal adequate cutoff N.

    Raises:
        InputError: If ``tol`` is not positive.
        ConvergenceError: If no cutoff below the ceiling is adequate.
    """
    if tol <= 0:
        raise InputError(f"tol must be positive, got {tol}")

    cutoff = max(math.ceil((levels - 1) / 2), model.harmonics, 1)
    shift = math.inf
    while cutoff + step <= ceiling:
        coarse = eigensolve(model.replace(cutoff=cutoff), levels).energies
        fine = eigensolve(model.replace(cutoff=cutoff + step), levels).energies
        shift = float(np.max(np.abs(coarse - fine)))
        if shift < tol:
            return cutoff
        cutoff += 1

    raise ConvergenceError(
        f"No cutoff up to {ceiling} converges {levels} levels to {tol} GHz.",
        diagnostics={"ceiling": ceiling, "last_shift": shift, "levels": levels},
    )
