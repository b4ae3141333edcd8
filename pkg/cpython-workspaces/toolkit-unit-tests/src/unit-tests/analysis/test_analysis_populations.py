"""Unit tests for subspace population normalization."""

import numpy as np
import pytest
from quditkit.analysis import normalized_population
from quditkit.errors import DimensionMismatchError, InputError


def test_normalized_population():
    """Tests P_i / (P_i + P_j) element-wise."""
    np.testing.assert_allclose(normalized_population([0.3, 0.1], [0.1, 0.3]), [0.75, 0.25])
    assert normalized_population(0.2, 0.2) == pytest.approx(0.5)


def test_normalized_population_rejects():
    """Tests mismatched shapes and an empty subspace."""
    with pytest.raises(DimensionMismatchError):
        normalized_population([0.1, 0.2], [0.1])
    with pytest.raises(InputError):
        normalized_population([0.1, 0.0], [0.1, 0.0])
