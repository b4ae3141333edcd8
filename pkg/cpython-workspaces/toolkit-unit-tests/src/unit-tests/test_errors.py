"""Unit tests for the quditkit error hierarchy."""

import pytest
from quditkit.errors import (
    ArityError,
    ConvergenceError,
    CoverageError,
    DegeneracyError,
    DeviceFileError,
    DimensionMismatchError,
    FitError,
    InfeasibleError,
    InputError,
    InvalidModelError,
    NumericalError,
    QuditkitError,
)


@pytest.mark.parametrize(
    "cls,category",
    [
        (InvalidModelError, "invalid-model"),
        (ArityError, "arity"),
        (CoverageError, "coverage"),
        (DimensionMismatchError, "dimension"),
        (DeviceFileError, "device-file"),
    ],
)
def test_input_errors(cls, category):
    """Tests that input errors share the input family and carry a category.

    Args:
        cls: Error class under test.
        category: Its expected category.
    """
    err = cls()
    assert isinstance(err, InputError)
    assert isinstance(err, ValueError)
    assert err.category == category


@pytest.mark.parametrize("cls", [ConvergenceError, DegeneracyError, FitError, InfeasibleError])
def test_numerical_errors(cls):
    """Tests that numerical errors are not input errors.

    Args:
        cls: Error class under test.
    """
    err = cls()
    assert isinstance(err, NumericalError)
    assert isinstance(err, QuditkitError)
    assert not isinstance(err, InputError)


def test_fit_error_payload():
    """Tests that a fit error keeps its best point and diagnostics."""
    err = FitError("Simplex stalled.", best_point={"e_c": 0.1}, diagnostics={"nfev": 4000})
    assert str(err) == "Simplex stalled."
    assert err.best_point == {"e_c": 0.1}
    assert err.diagnostics == {"nfev": 4000}
    assert err.category == "fit"


def test_infeasible_error_level():
    """Tests that an infeasible error names the offending level."""
    err = InfeasibleError("Negative rate.", level=3)
    assert err.level == 3
    assert err.category == "infeasible"
