"""This module provides the Counter class for tallying events (for example the
errors a Logger has recorded) during a single quditkit run.

**Usage:**
```python
error_counter = Counter("errors")
error_counter.increment()
error_counter.get()  # 1
```
"""


class Counter:
    """
    Counter class for managing an 8-bit rolling count held in memory.

    Attributes:
        _name (str): Identifier used when reporting the counter.
        _value (int): The current count.
    """

    def __init__(self, name: str = "errors", start: int = 0) -> None:
        """
        Initializes a Counter instance.

        Args:
            name (str): Identifier of the counter.
            start (int): Initial value, 0 to 255.

        Raises:
            ValueError: If the start value does not fit in 8 bits.
        """
        if not 0 <= start <= 0xFF:
            raise ValueError(f"Counter start value must fit in 8 bits, got {start}.")

        self._name = name
        self._value = start

    def get(self) -> int:
        """
        Returns the value of the counter.

        Returns:
            int: The current value of the counter.
        """
        return self._value

    def increment(self) -> None:
        """
        Increases the counter by one, with 8-bit rollover.
        """
        self._value = (self._value + 1) & 0xFF

    def get_name(self) -> str:
        """
        get_name returns the name of the counter
        """
        return f"{self.__class__.__name__}_{self._name}"
