"""Qudit state tomography with nearest-neighbor subspace rotations.

Every gate rotates one {|i⟩, |i+1⟩} subspace by exp(-iθσ/2) with σ = σ_x or
σ_y, and acts as the identity elsewhere. A ``GateSequence`` is stored in
operator-product order: its unitary is the left-to-right product, so the
right-most rotation is applied first.

The gate set for a d-level state is the identity plus, for every element
ρ_{i,i+k}, a chain of π rotations that moves |i+k⟩ down to |i+1⟩ followed by
an X or Y π/2 rotation on {|i⟩, |i+1⟩}. That gives 1 + d(d-1) sequences.

Reconstruction solves the linear measurement model
p_s(m) = ⟨m|U_s ρ U_s†|m⟩ by least squares over unit-trace Hermitian
matrices, then projects onto the positive semidefinite cone.

**Usage:**
```python
gates = tomography_gate_set(9)
probabilities = simulate_tomography(rho, gates, shots=5000, seed=1)
estimate = reconstruct_state(probabilities, gates)
state_fidelity(estimate, psi)
```
"""

import re
from dataclasses import dataclass, field
from functools import reduce

import numpy as np
import scipy.linalg

from ..errors import DimensionMismatchError, InputError

HERMITIAN_TOLERANCE = 1e-12
TRACE_TOLERANCE = 1e-12
EIGENVALUE_TOLERANCE = 1e-10
FIDELITY_CEILING = 1 + 1e-9

_TOKEN = re.compile(
    r"^(?P<axis>[XY])(?:(?P<low>\d+)-(?P<high>\d+)|(?P<i>\d)(?P<j>\d)):(?P<angle>[-+]?\d+(?:\.\d*)?(?:[eE][-+]?\d+)?)$"
)


def subspace_unitary(d: int, i: int, axis: str, angle: float) -> np.ndarray:
    """Rotation by ``angle`` radians about ``axis`` in the {|i⟩, |i+1⟩} subspace of a d-level system.

    Raises:
        InputError: If the subspace lies outside the d levels or ``axis`` is not X or Y.
    """
    if not 0 <= i < d - 1:
        raise InputError(f"subspace {{{i}, {i + 1}}} outside {d} levels")
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    if axis == "X":
        block = np.array([[c, -1j * s], [-1j * s, c]])
    elif axis == "Y":
        block = np.array([[c, -s], [s, c]], dtype=complex)
    else:
        raise InputError(f"axis must be 'X' or 'Y', got {axis!r}")
    unitary = np.eye(d, dtype=complex)
    unitary[i : i + 2, i : i + 2] = block
    return unitary


@dataclass(frozen=True)
class GateRotation:
    """A rotation of the {|level⟩, |level+1⟩} subspace; ``angle`` in degrees."""

    level: int
    axis: str
    angle: float

    def to_mnemonic(self) -> str:
        """``X01:90`` style token; levels of 10 and above use ``X9-10:180``."""
        pair = f"{self.level}{self.level + 1}" if self.level + 1 < 10 else f"{self.level}-{self.level + 1}"
        return f"{self.axis}{pair}:{self.angle:g}"

    def unitary(self, d: int) -> np.ndarray:
        """The d×d unitary of this rotation."""
        return subspace_unitary(d, self.level, self.axis, np.deg2rad(self.angle))


@dataclass(frozen=True)
class GateSequence:
    """Rotations in operator-product order; empty is the identity."""

    rotations: tuple[GateRotation, ...] = ()

    def unitary(self, d: int) -> np.ndarray:
        """The left-to-right product of the rotation unitaries."""
        return reduce(np.matmul, (r.unitary(d) for r in self.rotations), np.eye(d, dtype=complex))

    def to_mnemonic(self) -> str:
        """Semicolon-joined tokens, or ``I`` for the identity."""
        return ";".join(r.to_mnemonic() for r in self.rotations) or "I"

    @classmethod
    def from_mnemonic(cls, text: str) -> "GateSequence":
        """Parses ``to_mnemonic`` output.

        Raises:
            InputError: On a malformed token.
        """
        text = text.strip()
        if text == "I":
            return cls()
        rotations = []
        for token in text.split(";"):
            match = _TOKEN.match(token.strip())
            if match is None:
                raise InputError(f"malformed gate token {token!r}")
            if match["low"] is not None:
                low, high = int(match["low"]), int(match["high"])
            else:
                low, high = int(match["i"]), int(match["j"])
            if high != low + 1:
                raise InputError(f"gate token {token!r} does not name neighboring levels")
            rotations.append(GateRotation(low, match["axis"], float(match["angle"])))
        return cls(tuple(rotations))


def tomography_gate_set(d: int) -> list[GateSequence]:
    """The 1 + d(d-1) tomography sequences for a d-level state.

    Raises:
        InputError: If d < 2.
    """
    if d < 2:
        raise InputError(f"d must be at least 2, got {d}")
    gates = [GateSequence()]
    for k in range(1, d):
        for i in range(d - k):
            chain = tuple(GateRotation(level, "X", 180.0) for level in range(i + 1, i + k))
            for axis in ("X", "Y"):
                gates.append(GateSequence((GateRotation(i, axis, 90.0),) + chain))
    return gates


@dataclass(frozen=True)
class DensityMatrix:
    """A d×d density matrix.

    Raises:
        InputError: If the matrix is not square, Hermitian, unit-trace and
            positive semidefinite within tolerance.
    """

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        """Freezes the matrix after checking its invariants."""
        rho = np.array(self.matrix, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise InputError(f"density matrix must be square, got shape {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOLERANCE:
            raise InputError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > TRACE_TOLERANCE:
            raise InputError(f"density matrix trace is {np.trace(rho).real:.15g}, expected 1")
        if np.linalg.eigvalsh(rho).min() < -EIGENVALUE_TOLERANCE:
            raise InputError("density matrix is not positive semidefinite")
        rho.setflags(write=False)
        object.__setattr__(self, "matrix", rho)

    @classmethod
    def pure(cls, psi) -> "DensityMatrix":
        """|ψ⟩⟨ψ| for a state vector, normalized first."""
        psi = _normalized(psi)
        return cls(np.outer(psi, psi.conj()))

    @property
    def dimension(self) -> int:
        """d."""
        return self.matrix.shape[0]

    @property
    def purity(self) -> float:
        """Tr ρ²."""
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def to_dict(self) -> dict:
        """Real and imaginary parts as nested lists."""
        return {"real": self.matrix.real.tolist(), "imag": self.matrix.imag.tolist()}


def _normalized(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise InputError("state vector has zero norm")
    return psi / norm


def state_fidelity(rho: DensityMatrix, psi) -> float:
    """F = ⟨ψ|ρ|ψ⟩ for a pure target state.

    Raises:
        DimensionMismatchError: If the dimensions differ.
    """
    psi = _normalized(psi)
    if psi.size != rho.dimension:
        raise DimensionMismatchError(f"state of dimension {psi.size} against ρ of dimension {rho.dimension}")
    fidelity = float(np.real(psi.conj() @ rho.matrix @ psi))
    return min(max(fidelity, 0.0), FIDELITY_CEILING)


def ideal_probabilities(rho: DensityMatrix, gates: list[GateSequence]) -> np.ndarray:
    """p[s, m] = ⟨m|U_s ρ U_s†|m⟩ for every sequence."""
    d = rho.dimension
    probabilities = np.empty((len(gates), d))
    for s, gate in enumerate(gates):
        u = gate.unitary(d)
        probabilities[s] = np.real(np.einsum("mp,pq,mq->m", u, rho.matrix, u.conj()))
    return probabilities


def simulate_tomography(
    rho: DensityMatrix, gates: list[GateSequence], shots: int, seed: int | None = None
) -> np.ndarray:
    """Multinomially sampled outcome frequencies, ``shots`` per sequence."""
    if shots < 1:
        raise InputError(f"shots must be positive, got {shots}")
    rng = np.random.default_rng(seed)
    probabilities = np.clip(ideal_probabilities(rho, gates), 0.0, None)
    probabilities /= probabilities.sum(axis=1, keepdims=True)
    return np.array([rng.multinomial(shots, p) for p in probabilities]) / shots


def hermitian_basis(d: int) -> tuple[np.ndarray, list[str]]:
    """A real basis of d×d Hermitian matrices with element labels."""
    basis, labels = [], []
    for j in range(d):
        b = np.zeros((d, d), dtype=complex)
        b[j, j] = 1
        basis.append(b)
        labels.append(f"rho[{j},{j}]")
    for j in range(d):
        for k in range(j + 1, d):
            re = np.zeros((d, d), dtype=complex)
            re[j, k] = re[k, j] = 1
            im = np.zeros((d, d), dtype=complex)
            im[j, k], im[k, j] = 1j, -1j
            basis += [re, im]
            labels += [f"Re rho[{j},{k}]", f"Im rho[{j},{k}]"]
    return np.array(basis), labels


def project_psd(matrix: np.ndarray) -> np.ndarray:
    """Closest unit-trace PSD matrix by subtract-and-rescale of the sorted eigenvalues."""
    hermitian = (matrix + matrix.conj().T) / 2
    values, vectors = np.linalg.eigh(hermitian)
    values, vectors = values[::-1].copy(), vectors[:, ::-1]
    values /= values.sum()

    deficit = 0.0
    keep = values.size
    # zero the negative tail and spread its weight over the rest
    while keep > 0 and values[keep - 1] + deficit / keep < 0:
        deficit += values[keep - 1]
        values[keep - 1] = 0.0
        keep -= 1
    values[:keep] += deficit / keep

    rho = (vectors * values) @ vectors.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


def reconstruct_state(probabilities, gates: list[GateSequence]) -> DensityMatrix:
    """Linear-inversion estimate of ρ projected onto the PSD cone.

    Args:
        probabilities: Outcome frequencies of shape (sequences, d).
        gates: The sequences that produced them.

    Raises:
        DimensionMismatchError: If the shapes disagree.
        InputError: If the gate set does not determine every element; the
            message lists the undetermined ones.
    """
    p = np.asarray(probabilities, dtype=float)
    if p.ndim != 2 or p.shape[0] != len(gates):
        raise DimensionMismatchError(f"probabilities of shape {p.shape} for {len(gates)} sequences")
    d = p.shape[1]
    basis, labels = hermitian_basis(d)

    design = np.concatenate(
        [np.real(np.einsum("mp,apq,mq->ma", u, basis, u.conj())) for u in (g.unitary(d) for g in gates)]
    )
    trace = np.real(np.einsum("app->a", basis))
    x0 = trace / (trace @ trace)
    free = scipy.linalg.null_space(trace[None, :])
    reduced = design @ free

    if np.linalg.matrix_rank(reduced) < free.shape[1]:
        undetermined = free @ scipy.linalg.null_space(reduced)
        missing = [labels[a] for a in np.flatnonzero(np.max(np.abs(undetermined), axis=1) > 1e-6)]
        raise InputError(f"gate set does not determine {', '.join(missing)}")

    z, *_ = np.linalg.lstsq(reduced, p.ravel() - design @ x0, rcond=None)
    estimate = np.einsum("a,apq->pq", x0 + free @ z, basis)
    return DensityMatrix(project_psd(estimate))
