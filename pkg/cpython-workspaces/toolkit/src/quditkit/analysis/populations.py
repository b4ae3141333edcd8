"""Population bookkeeping for subspace experiments."""

import numpy as np

from ..errors import DimensionMismatchError, InputError


def normalized_population(p_i, p_j) -> np.ndarray:
    """P_i / (P_i + P_j), the population of |i⟩ normalized to the {|i⟩, |j⟩} subspace.

    Raises:
        DimensionMismatchError: If the inputs differ in shape.
        InputError: If a subspace population is not positive.
    """
    p_i = np.asarray(p_i, dtype=float)
    p_j = np.asarray(p_j, dtype=float)
    if p_i.shape != p_j.shape:
        raise DimensionMismatchError(f"shapes {p_i.shape} and {p_j.shape} differ")
    total = p_i + p_j
    if np.any(total <= 0):
        raise InputError("subspace population must be positive")
    return p_i / total
