"""This module writes the files every ``quditkit`` command produces.

A command named ``spectrum`` run with ``--out results`` writes:

* ``results/spectrum.csv``: its table, numbers formatted with ``%.12g``;
* ``results/spectrum.report.json``: its report, keys sorted;
* ``results/spectrum.plot.csv``: x/y series, only with ``--plot-data``.

A failing command writes ``results/error.json`` instead.

**Usage:**
```python
out = CommandOutput("results", "spectrum", plot_data=True)
out.write_table({"index": [0, 1], "transition_ghz": [4.9472, 4.8437]})
out.write_report({"n_levels": 12})
```
"""

import csv
import json
import math
import os

import numpy as np

from quditkit.errors import QuditkitError

NUMBER_FORMAT = "%.12g"


def format_cell(value) -> str:
    """Renders one CSV cell; None becomes an empty cell."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return NUMBER_FORMAT % float(value)
    return str(value)


def _jsonable(value):
    """Converts numpy values and non-finite floats for ``json.dumps``."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, np.generic):
        return _jsonable(value.item())
    if isinstance(value, complex):
        return {"real": value.real, "imag": value.imag}
    # JSON has no inf or nan
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def write_columns(path: str, columns: dict[str, list]) -> None:
    """Writes equal-length columns as a CSV file.

    Raises:
        ValueError: If the columns differ in length.
    """
    lengths = {len(v) for v in columns.values()}
    if len(lengths) > 1:
        raise ValueError(f"columns of {path} differ in length: {sorted(lengths)}")
    rows = zip(*columns.values())
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns.keys())
        for row in rows:
            writer.writerow([format_cell(v) for v in row])


def write_json(path: str, document: dict) -> None:
    """Writes ``document`` with sorted keys and a trailing newline."""
    with open(path, "w") as f:
        f.write(json.dumps(_jsonable(document), indent=2, sort_keys=True))
        f.write("\n")


class CommandOutput:
    """The output files of one command."""

    def __init__(self, out_dir: str, command: str, plot_data: bool = False) -> None:
        """
        Initializes the output and creates ``out_dir`` if needed.

        Args:
            out_dir: Directory all files go to.
            command: File stem, e.g. ``readout-sim``.
            plot_data: Whether ``write_plot`` writes anything.
        """
        os.makedirs(out_dir, exist_ok=True)
        self.out_dir: str = out_dir
        self.command: str = command
        self.plot_data: bool = plot_data

    def path(self, suffix: str) -> str:
        """Path of ``<command><suffix>`` in the output directory."""
        return os.path.join(self.out_dir, self.command + suffix)

    def write_table(self, columns: dict[str, list]) -> str:
        """Writes the command's CSV table and returns its path."""
        path = self.path(".csv")
        write_columns(path, columns)
        return path

    def write_report(self, report: dict) -> str:
        """Writes the command's JSON report and returns its path."""
        path = self.path(".report.json")
        write_json(path, {"command": self.command, **report})
        return path

    def write_plot(self, columns: dict[str, list]) -> str | None:
        """Writes x/y plot series when enabled; returns the path or None."""
        if not self.plot_data:
            return None
        path = self.path(".plot.csv")
        write_columns(path, columns)
        return path


def error_category(err: Exception) -> str:
    """The machine-readable category of ``err``."""
    if isinstance(err, QuditkitError):
        return err.category
    if isinstance(err, FileNotFoundError):
        return "file-not-found"
    return "internal"


def write_error(out_dir: str, command: str, err: Exception, exit_code: int) -> str:
    """Writes ``error.json`` describing a failed command."""
    os.makedirs(out_dir, exist_ok=True)
    document = {
        "command": command,
        "category": error_category(err),
        "type": type(err).__name__,
        "message": str(err),
        "exit_code": exit_code,
    }
    for key in ("diagnostics", "best_point"):
        value = getattr(err, key, None)
        if value:
            document[key] = value
    level = getattr(err, "level", None)
    if level is not None:
        document["level"] = level
    path = os.path.join(out_dir, "error.json")
    write_json(path, document)
    return path
