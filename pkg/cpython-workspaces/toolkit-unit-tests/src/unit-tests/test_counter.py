"""Unit tests for the Counter class."""

import pytest
from quditkit.counter import Counter


def test_counter_starts_at_zero():
    """Tests that a new counter reads zero."""
    counter = Counter()
    assert counter.get() == 0


def test_counter_increment():
    """Tests that increment adds one."""
    counter = Counter(start=4)
    counter.increment()
    assert counter.get() == 5


def test_counter_rollover():
    """Tests that the counter wraps from 255 to 0."""
    counter = Counter(start=255)
    counter.increment()
    assert counter.get() == 0


@pytest.mark.parametrize("start", [-1, 256])
def test_counter_rejects_start_outside_byte(start):
    """Tests that a start value outside 0..255 is rejected.

    Args:
        start: Out-of-range start value.
    """
    with pytest.raises(ValueError):
        Counter(start=start)


def test_get_name():
    """Tests the counter's reporting name."""
    assert Counter("errors").get_name() == "Counter_errors"
