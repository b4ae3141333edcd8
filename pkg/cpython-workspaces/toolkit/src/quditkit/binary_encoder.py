"""Compact binary encoding for quditkit manifests.

Fields are written as ``[key_hash:4][type:1][payload]`` with big-endian struct
packing. Key hashes use CRC-32 so a manifest written by one process can be
decoded by another given the list of expected keys. Besides scalar ints,
floats and strings the codec stores float64 and int64 arrays, which is what
shot-set manifests are made of.

**Usage:**
```python
encoder = BinaryEncoder()
encoder.add_int("schema_version", 1)
encoder.add_float("integration_us", 2.2, double_precision=True)
encoder.add_float_array("values", records.ravel())
data = encoder.to_bytes()

decoder = BinaryDecoder(data, keys=["schema_version", "integration_us", "values"])
values = decoder.get_float_array("values")
```
"""

import struct
import zlib
from collections import OrderedDict
from collections.abc import Iterable

import numpy as np

# type ids
_STRING = 0
_FLOAT32 = 5
_FLOAT64 = 6
_FLOAT64_ARRAY = 7
_INT64_ARRAY = 8
_LONG_STRING = 9

_INTEGER_TYPES = {
    "b": 1,
    "h": 2,
    "i": 3,
    "q": 4,
    "B": 11,
    "H": 12,
    "I": 13,
    "Q": 14,
}
_INTEGER_FORMATS = {type_id: fmt for fmt, type_id in _INTEGER_TYPES.items()}


def key_hash(key: str) -> int:
    """Returns the stable 4-byte hash used for a field key.

    Args:
        key: The key name.

    Returns:
        CRC-32 of the UTF-8 key.
    """
    return zlib.crc32(key.encode("utf-8")) & 0xFFFFFFFF


class BinaryEncoder:
    """Encodes named values into a compact binary format."""

    def __init__(self) -> None:
        """Initialize the binary encoder."""
        self._data: OrderedDict[str, tuple[int, object]] = OrderedDict()
        self._key_map: dict[int, str] = {}

    def get_key_map(self) -> dict[int, str]:
        """Get the key mapping for decoding.

        Returns:
            Dictionary mapping key hashes to key names
        """
        return {key_hash(key): key for key in self._data}

    def add_int(self, key: str, value: int, size: int | None = None) -> None:
        """Add an integer value.

        Args:
            key: The key name for the value
            value: The integer value
            size: Size in bytes (1, 2, 4, or 8). If None, the smallest size that holds the value.

        Raises:
            ValueError: If size is not supported or the value does not fit.
        """
        value = int(value)
        if size is None:
            size = next((s for s in (1, 2, 4, 8) if self._fits(value, s)), 8)
        if size not in (1, 2, 4, 8):
            raise ValueError(f"Unsupported integer size: {size}")
        if not self._fits(value, size):
            raise ValueError(f"Value {value} does not fit in {size} bytes")

        signed, unsigned = {1: "bB", 2: "hH", 4: "iI", 8: "qQ"}[size]
        bits = 8 * size
        fmt = signed if -(1 << (bits - 1)) <= value < (1 << (bits - 1)) else unsigned
        self._data[key] = (_INTEGER_TYPES[fmt], value)

    @staticmethod
    def _fits(value: int, size: int) -> bool:
        """Check whether an integer fits a signed or unsigned field of ``size`` bytes."""
        bits = 8 * size
        return -(1 << (bits - 1)) <= value < (1 << bits)

    def add_float(self, key: str, value: float, double_precision: bool = False) -> None:
        """Add a float value.

        Args:
            key: The key name for the value
            value: The float value
            double_precision: Use double precision (8 bytes) instead of single (4 bytes)
        """
        self._data[key] = (_FLOAT64 if double_precision else _FLOAT32, float(value))

    def add_string(self, key: str, value: str) -> None:
        """Add a UTF-8 string with a length prefix.

        Strings up to 255 bytes use a 1-byte prefix, longer ones a 4-byte prefix.

        Args:
            key: The key name for the value
            value: The string value
        """
        encoded = value.encode("utf-8")
        self._data[key] = (_STRING if len(encoded) <= 0xFF else _LONG_STRING, encoded)

    def add_float_array(self, key: str, values: Iterable[float]) -> None:
        """Add a one-dimensional float64 array.

        Args:
            key: The key name for the value
            values: The numbers to store
        """
        array = np.ascontiguousarray(np.asarray(values, dtype=">f8").ravel())
        self._data[key] = (_FLOAT64_ARRAY, array)

    def add_int_array(self, key: str, values: Iterable[int]) -> None:
        """Add a one-dimensional int64 array.

        Args:
            key: The key name for the value
            values: The integers to store
        """
        array = np.ascontiguousarray(np.asarray(values, dtype=">i8").ravel())
        self._data[key] = (_INT64_ARRAY, array)

    def to_bytes(self) -> bytes:
        """Convert the encoded data to bytes.

        Format: [key_hash:4][type:1][data:variable]...

        Returns:
            The binary representation of all added data
        """
        chunks = []
        for key, (type_id, value) in self._data.items():
            khash = key_hash(key)
            self._key_map[khash] = key
            chunks.append(struct.pack(">IB", khash, type_id))
            chunks.append(self._encode_payload(type_id, value))
        return b"".join(chunks)

    def _encode_payload(self, type_id: int, value) -> bytes:
        """Encode the payload of one field.

        Args:
            type_id: Field type identifier
            value: Value to encode

        Returns:
            Encoded payload bytes
        """
        if type_id == _STRING:
            return struct.pack(">B", len(value)) + value
        if type_id == _LONG_STRING:
            return struct.pack(">I", len(value)) + value
        if type_id in (_FLOAT64_ARRAY, _INT64_ARRAY):
            return struct.pack(">I", value.size) + value.tobytes()
        if type_id == _FLOAT32:
            return struct.pack(">f", value)
        if type_id == _FLOAT64:
            return struct.pack(">d", value)
        return struct.pack(">" + _INTEGER_FORMATS[type_id], value)


class BinaryDecoder:
    """Decodes data from binary format."""

    def __init__(
        self,
        data: bytes,
        key_map: dict[int, str] | None = None,
        keys: Iterable[str] | None = None,
    ) -> None:
        """Initialize the binary decoder.

        Args:
            data: The binary data to decode
            key_map: Optional mapping from hash to key name
            keys: Optional key names; their hashes are added to the key map

        Raises:
            ValueError: If the data are truncated or hold an unknown type id.
        """
        self._data: dict[str, object] = {}
        self._key_map = dict(key_map or {})
        for key in keys or ():
            self._key_map[key_hash(key)] = key
        self._parse(data)

    def _parse(self, data: bytes) -> None:
        """Parse the binary data."""
        offset = 0
        while offset < len(data):
            if offset + 5 > len(data):
                raise ValueError(f"Truncated field header at byte {offset}")
            khash, type_id = struct.unpack(">IB", data[offset : offset + 5])
            offset += 5
            value, consumed = self._decode_payload(data, offset, type_id)
            self._data[self._key_map.get(khash, f"field_{khash:08x}")] = value
            offset += consumed

    def _decode_payload(self, data: bytes, offset: int, type_id: int) -> tuple:
        """Decode a single payload.

        Args:
            data: Binary data
            offset: Offset of the payload
            type_id: Type identifier

        Returns:
            Tuple of (decoded_value, bytes_consumed)
        """
        if type_id in (_STRING, _LONG_STRING):
            prefix = ">B" if type_id == _STRING else ">I"
            width = struct.calcsize(prefix)
            (length,) = struct.unpack(prefix, self._take(data, offset, width))
            raw = self._take(data, offset + width, length)
            return raw.decode("utf-8"), width + length

        if type_id in (_FLOAT64_ARRAY, _INT64_ARRAY):
            (count,) = struct.unpack(">I", self._take(data, offset, 4))
            dtype = ">f8" if type_id == _FLOAT64_ARRAY else ">i8"
            raw = self._take(data, offset + 4, 8 * count)
            native = "float64" if type_id == _FLOAT64_ARRAY else "int64"
            return np.frombuffer(raw, dtype=dtype).astype(native), 4 + 8 * count

        if type_id in (_FLOAT32, _FLOAT64):
            fmt = ">f" if type_id == _FLOAT32 else ">d"
        elif type_id in _INTEGER_FORMATS:
            fmt = ">" + _INTEGER_FORMATS[type_id]
        else:
            raise ValueError(f"Unknown field type id {type_id} at byte {offset}")

        size = struct.calcsize(fmt)
        (value,) = struct.unpack(fmt, self._take(data, offset, size))
        return value, size

    @staticmethod
    def _take(data: bytes, offset: int, size: int) -> bytes:
        """Slice ``size`` bytes or raise if the buffer is too short."""
        if offset + size > len(data):
            raise ValueError(f"Truncated payload at byte {offset}")
        return data[offset : offset + size]

    def get_int(self, key: str) -> int | None:
        """Get an integer value.

        Args:
            key: The key name

        Returns:
            The integer value or None if not found
        """
        value = self._data.get(key)
        return int(value) if value is not None else None

    def get_float(self, key: str) -> float | None:
        """Get a float value.

        Args:
            key: The key name

        Returns:
            The float value or None if not found
        """
        value = self._data.get(key)
        return float(value) if value is not None else None

    def get_string(self, key: str) -> str | None:
        """Get a string value.

        Args:
            key: The key name

        Returns:
            The string value or None if not found
        """
        value = self._data.get(key)
        return str(value) if value is not None else None

    def get_float_array(self, key: str) -> np.ndarray | None:
        """Get a float64 array.

        Args:
            key: The key name

        Returns:
            The array or None if not found
        """
        value = self._data.get(key)
        return np.asarray(value, dtype=float) if value is not None else None

    def get_int_array(self, key: str) -> np.ndarray | None:
        """Get an int64 array.

        Args:
            key: The key name

        Returns:
            The array or None if not found
        """
        value = self._data.get(key)
        return np.asarray(value, dtype=np.int64) if value is not None else None

    def get_all(self) -> dict[str, object]:
        """Get all decoded data.

        Returns:
            Dictionary containing all decoded key-value pairs
        """
        return self._data.copy()
