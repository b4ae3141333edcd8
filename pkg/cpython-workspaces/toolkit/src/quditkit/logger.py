"""This module provides the Logger used by every long-running quditkit routine.

Records are JSON lines: ``time``, ``level`` and ``msg`` come first, followed by
the caller's key/values. Numpy scalars and arrays are written as plain JSON,
anything else JSON cannot hold as its string form. Records go to a stream
(standard output unless set) and, after ``set_log_dir``, to ``activity.log``.

Errors and critical records increment an error ``Counter``.

**Usage:**
```python
logger = Logger(Counter("errors"), log_level=LogLevel.INFO, colorized=True)
logger.info("Fitted standard model.", e_j=32.191, e_c=0.099)
logger.error("Fit failed.", err=FitError(), category="fit")
```
"""

import json
import os
import sys
import time
import traceback
import warnings
from collections import Counter as Tally
from enum import IntEnum
from typing import TextIO

import numpy as np

from .counter import Counter

LOG_FILE = "activity.log"
RESERVED_KEYS = ("time", "level", "msg")

_ANSI_COLORS = {
    "red": "1",
    "green": "2",
    "orange": "3",
    "blue": "4",
    "pink": "5",
    "teal": "6",
    "white": "7",
    "gray": "9",
}
_ANSI_FORMATS = {"normal": "0", "bold": "1", "ulined": "4"}


def _color(msg: str, color: str = "gray", fmt: str = "normal") -> str:
    """
    Wraps ``msg`` in ANSI escape codes.

    Args:
        msg: The text to colorize.
        color: A key of ``_ANSI_COLORS``.
        fmt: A key of ``_ANSI_FORMATS``.
    """
    return f"\033[{_ANSI_FORMATS[fmt]};3{_ANSI_COLORS[color]}m{msg}\033[0;39;49m"


class LogLevel(IntEnum):
    """Severity of a record; records below the logger's level are dropped."""

    NOTSET = 0
    DEBUG = 1
    INFO = 2
    WARNING = 3
    ERROR = 4
    CRITICAL = 5

    @classmethod
    def from_name(cls, name: str) -> "LogLevel":
        """Resolves a case-insensitive name such as ``"info"``.

        Raises:
            ValueError: If the name is not a known level.
        """
        try:
            return cls[name.upper()]
        except KeyError as e:
            raise ValueError(f"Unknown log level: {name}") from e


LEVEL_COLORS = {
    LogLevel.DEBUG: "blue",
    LogLevel.INFO: "green",
    LogLevel.WARNING: "orange",
    LogLevel.ERROR: "pink",
    LogLevel.CRITICAL: "red",
}


def _loggable(value: object) -> object:
    """A JSON-serializable stand-in for ``value``."""
    if isinstance(value, BaseException):
        return traceback.format_exception(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, (dict, list, tuple, str, int, float, bool, type(None))):
        return value
    return str(value)


class Logger:
    """Writes structured records and counts errors."""

    def __init__(
        self,
        error_counter: Counter,
        log_level: int = LogLevel.NOTSET,
        colorized: bool = False,
        stream: TextIO | None = None,
    ) -> None:
        """
        Initializes the Logger instance.

        Args:
            error_counter: Counter for error occurrences.
            log_level: Lowest level that is written.
            colorized: Whether to colorize the level name on the stream.
            stream: Where records are printed. Defaults to ``sys.stdout`` at call time.
        """
        self._error_counter: Counter = error_counter
        self._log_level: LogLevel = LogLevel(log_level)
        self.colorized: bool = colorized
        self._stream: TextIO | None = stream
        self._log_dir: str | None = None

    def _emit(self, level: LogLevel, message: str, fields: dict) -> None:
        """
        Writes one record if ``level`` passes the threshold.

        Args:
            level: Severity of the record.
            message: The log message.
            fields: Additional key/values; none may be a reserved key.

        Raises:
            ValueError: If a field shadows ``time``, ``level`` or ``msg``.
        """
        clash = sorted(set(fields) & set(RESERVED_KEYS))
        if clash:
            raise ValueError(f"log fields may not be named {clash}")
        if level < self._log_level:
            return

        record = {
            "time": time.strftime("%Y-%m-%d %H:%M:%S", time.localtime()),
            "level": level.name,
            "msg": message,
        }
        record.update((key, _loggable(value)) for key, value in fields.items())
        line = json.dumps(record, default=str)

        if self._log_dir is not None:
            with open(os.path.join(self._log_dir, LOG_FILE), "a") as f:
                f.write(line + "\n")

        if self.colorized:
            colored = _color(msg=level.name, color=LEVEL_COLORS[level])
            line = line.replace(f'"level": "{level.name}"', f'"level": "{colored}"', 1)
        print(line, file=self._stream or sys.stdout)

    def debug(self, message: str, **kwargs: object) -> None:
        """
        Log a message with severity level DEBUG.

        Args:
            message (str): The log message.
            **kwargs: Additional key/value pairs to include in the log.
        """
        self._emit(LogLevel.DEBUG, message, kwargs)

    def info(self, message: str, **kwargs: object) -> None:
        """
        Log a message with severity level INFO.

        Args:
            message (str): The log message.
            **kwargs: Additional key/value pairs to include in the log.
        """
        self._emit(LogLevel.INFO, message, kwargs)

    def warning(self, message: str, **kwargs: object) -> None:
        """
        Log a message with severity level WARNING.

        Args:
            message (str): The log message.
            **kwargs: Additional key/value pairs to include in the log.
        """
        self._emit(LogLevel.WARNING, message, kwargs)

    def error(self, message: str, err: Exception, **kwargs: object) -> None:
        """
        Log a message with severity level ERROR and count it.

        Args:
            message (str): The log message.
            err (Exception): The exception to log with its traceback.
            **kwargs: Additional key/value pairs to include in the log.
        """
        self._error_counter.increment()
        self._emit(LogLevel.ERROR, message, {"err": err, **kwargs})

    def critical(self, message: str, err: Exception, **kwargs: object) -> None:
        """
        Log a message with severity level CRITICAL and count it.

        Args:
            message (str): The log message.
            err (Exception): The exception to log with its traceback.
            **kwargs: Additional key/value pairs to include in the log.
        """
        self._error_counter.increment()
        self._emit(LogLevel.CRITICAL, message, {"err": err, **kwargs})

    def log_warnings(self, caught: list[warnings.WarningMessage], **kwargs: object) -> None:
        """
        Re-logs warnings captured with ``warnings.catch_warnings(record=True)``.

        Identical warnings, e.g. from every step of an optimizer, become one
        record whose ``count`` says how often they were raised.

        Args:
            caught: The captured warning records.
            **kwargs: Additional key/value pairs added to every record.
        """
        tally = Tally((w.category.__name__, str(w.message)) for w in caught)
        for (category, message), count in tally.items():
            self.warning(message, category=category, count=count, **kwargs)

    def get_error_count(self) -> int:
        """The number of errors logged."""
        return self._error_counter.get()

    def set_log_dir(self, log_dir: str) -> None:
        """
        Also appends records to ``activity.log`` in ``log_dir``.

        Raises:
            ValueError: If the provided path is not a directory.
        """
        if not os.path.isdir(log_dir):
            raise ValueError(f"Logging path must be a directory, received {log_dir}.")
        self._log_dir = log_dir
