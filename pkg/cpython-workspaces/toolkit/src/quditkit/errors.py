"""This file contains the custom error and warning classes raised by quditkit.

Errors split in two families. ``InputError`` covers bad arguments, models and
files (the CLI exits with code 2). ``NumericalError`` covers solver, labeling
and fit failures (exit code 3). Every class has a stable ``category`` string
that the CLI reports in its machine-readable error record.

**Usage:**
```python
raise FitError("Simplex stalled.", best_point={"e_c": 0.1}, diagnostics={"nfev": 4000})
```
"""


class QuditkitError(Exception):
    """Base class for all quditkit errors."""

    category = "error"


class InputError(QuditkitError, ValueError):
    """Raised when an argument, model or input file is invalid."""

    category = "input"

    def __init__(self, message: str = "Invalid input.") -> None:
        """Initialize the input error with a custom message."""
        super().__init__(message)


class InvalidModelError(InputError):
    """Raised when a transmon or resonator model violates its invariants."""

    category = "invalid-model"

    def __init__(self, message: str = "Invalid model parameters.") -> None:
        """Initialize the invalid-model error with a custom message."""
        super().__init__(message)


class ArityError(InputError):
    """Raised when too few observations are supplied to determine a fit."""

    category = "arity"

    def __init__(
        self, message: str = "Observation set does not determine the model."
    ) -> None:
        """Initialize the arity error with a custom message."""
        super().__init__(message)


class CoverageError(InputError):
    """Raised when a required state is missing from a data set."""

    category = "coverage"

    def __init__(self, message: str = "Data set does not cover every state.") -> None:
        """Initialize the coverage error with a custom message."""
        super().__init__(message)


class DimensionMismatchError(InputError):
    """Raised when record or matrix dimensions disagree."""

    category = "dimension"

    def __init__(self, message: str = "Dimension mismatch.") -> None:
        """Initialize the dimension error with a custom message."""
        super().__init__(message)


class DeviceFileError(InputError):
    """Raised when a device file is malformed or references unknown names."""

    category = "device-file"

    def __init__(self, message: str = "Invalid device file.") -> None:
        """Initialize the device-file error with a custom message."""
        super().__init__(message)


class NumericalError(QuditkitError, ArithmeticError):
    """Raised when a numerical routine fails. Carries diagnostics."""

    category = "numerical"

    def __init__(
        self,
        message: str = "Numerical routine failed.",
        diagnostics: dict | None = None,
    ) -> None:
        """Initialize the numerical error with a message and diagnostics."""
        super().__init__(message)
        self.diagnostics: dict = dict(diagnostics or {})


class ConvergenceError(NumericalError):
    """Raised when a basis or series fails to converge below its ceiling."""

    category = "convergence"

    def __init__(
        self,
        message: str = "Calculation did not converge.",
        diagnostics: dict | None = None,
    ) -> None:
        """Initialize the convergence error with a message and diagnostics."""
        super().__init__(message, diagnostics)


class DegeneracyError(NumericalError):
    """Raised when dressed states cannot be labeled unambiguously."""

    category = "degeneracy"

    def __init__(
        self,
        message: str = "Ambiguous dressed-state labeling.",
        diagnostics: dict | None = None,
    ) -> None:
        """Initialize the degeneracy error with a message and diagnostics."""
        super().__init__(message, diagnostics)


class DataDegeneracyError(NumericalError):
    """Raised when training data yield a singular covariance."""

    category = "data-degeneracy"

    def __init__(
        self,
        message: str = "Covariance is singular after regularization.",
        diagnostics: dict | None = None,
    ) -> None:
        """Initialize the data-degeneracy error with a message and diagnostics."""
        super().__init__(message, diagnostics)


class FitError(NumericalError):
    """Raised when a fit does not converge. Carries the best point reached."""

    category = "fit"

    def __init__(
        self,
        message: str = "Fit did not converge.",
        best_point: dict | None = None,
        diagnostics: dict | None = None,
    ) -> None:
        """Initialize the fit error with the best point and diagnostics."""
        super().__init__(message, diagnostics)
        self.best_point: dict = dict(best_point or {})


class InfeasibleError(FitError):
    """Raised when measured data fall below a model's fixed floor."""

    category = "infeasible"

    def __init__(
        self,
        message: str = "Measured data are infeasible for the model.",
        level: int | None = None,
        diagnostics: dict | None = None,
    ) -> None:
        """Initialize the infeasibility error naming the offending level."""
        super().__init__(message, diagnostics=diagnostics)
        self.level = level


class QuditkitWarning(UserWarning):
    """Base class for quditkit warnings."""


class DispersiveBreakdownWarning(QuditkitWarning):
    """A transition lies within a linewidth of the resonator."""


class AsymptoticValidityWarning(QuditkitWarning):
    """An asymptotic formula is used outside its validity range."""


class PrecisionFloorWarning(QuditkitWarning):
    """A difference of eigenvalues is below what double precision resolves."""


class DegenerateLevelWarning(QuditkitWarning):
    """Two levels are near-degenerate and their ordering is not tracked."""


class EMConvergenceWarning(QuditkitWarning):
    """An EM refinement stopped early or was discarded."""


class IllConditionedWarning(QuditkitWarning):
    """A matrix is ill-conditioned for inversion."""


class DegenerateBeatWarning(QuditkitWarning):
    """A Ramsey signal shows a single frequency where two were expected."""


class ApproximationValidityWarning(QuditkitWarning):
    """A perturbative or single-event approximation is stretched."""
