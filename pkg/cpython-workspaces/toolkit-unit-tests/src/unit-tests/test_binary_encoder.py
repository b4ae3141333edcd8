"""Tests for the binary encoder module."""

import struct

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from quditkit.binary_encoder import BinaryDecoder, BinaryEncoder, key_hash


class TestBinaryEncoder:
    """Test cases for BinaryEncoder."""

    def test_empty_encoder(self):
        """Test encoding with no data."""
        encoder = BinaryEncoder()
        assert encoder.to_bytes() == b""

    def test_single_int(self):
        """Test encoding a single integer."""
        encoder = BinaryEncoder()
        encoder.add_int("schema_version", 1)
        data = encoder.to_bytes()

        decoder = BinaryDecoder(data, encoder.get_key_map())
        assert decoder.get_int("schema_version") == 1

    def test_int_is_sized_to_fit(self):
        """Test that automatic sizing picks the smallest field."""
        encoder = BinaryEncoder()
        encoder.add_int("small", 200)
        # 4-byte hash, 1-byte type, 1-byte unsigned payload
        assert len(encoder.to_bytes()) == 6

        encoder = BinaryEncoder()
        encoder.add_int("negative", -200)
        assert len(encoder.to_bytes()) == 7

    @pytest.mark.parametrize(
        "value,size",
        [(-128, 1), (255, 1), (-32768, 2), (65535, 2), (-(2**31), 4), (2**64 - 1, 8)],
    )
    def test_int_sizes(self, value, size):
        """Test the limits of each integer size.

        Args:
            value: Value at the edge of the field.
            size: Field size in bytes.
        """
        encoder = BinaryEncoder()
        encoder.add_int("value", value, size=size)
        decoder = BinaryDecoder(encoder.to_bytes(), encoder.get_key_map())
        assert decoder.get_int("value") == value

    def test_int_too_large(self):
        """Test that a value outside the requested size is rejected."""
        encoder = BinaryEncoder()
        with pytest.raises(ValueError):
            encoder.add_int("value", 256, size=1)
        with pytest.raises(ValueError):
            encoder.add_int("value", 2**64)

    def test_unsupported_int_size(self):
        """Test that only 1, 2, 4 and 8 byte integers are accepted."""
        with pytest.raises(ValueError):
            BinaryEncoder().add_int("value", 1, size=3)

    def test_single_float(self):
        """Test encoding a single-precision float."""
        encoder = BinaryEncoder()
        encoder.add_float("integration_us", 2.2)
        decoder = BinaryDecoder(encoder.to_bytes(), encoder.get_key_map())
        result = decoder.get_float("integration_us")
        assert result is not None
        assert abs(result - 2.2) < 1e-6

    def test_double_float(self):
        """Test that double precision keeps GHz-scale frequencies exact."""
        encoder = BinaryEncoder()
        encoder.add_float("f_r", 6.468937, double_precision=True)
        decoder = BinaryDecoder(encoder.to_bytes(), encoder.get_key_map())
        assert decoder.get_float("f_r") == 6.468937

    def test_strings(self):
        """Test short and long strings."""
        long_text = "x" * 1000
        encoder = BinaryEncoder()
        encoder.add_string("name", "three-tone")
        encoder.add_string("notes", long_text)
        decoder = BinaryDecoder(encoder.to_bytes(), encoder.get_key_map())
        assert decoder.get_string("name") == "three-tone"
        assert decoder.get_string("notes") == long_text

    def test_arrays(self):
        """Test float and int arrays."""
        values = np.array([[0.1, -0.2], [1e-9, 3.5]])
        labels = [0, 1, 9, -1]
        encoder = BinaryEncoder()
        encoder.add_float_array("values", values)
        encoder.add_int_array("labels", labels)
        decoder = BinaryDecoder(encoder.to_bytes(), keys=["values", "labels"])
        np.testing.assert_array_equal(decoder.get_float_array("values"), values.ravel())
        np.testing.assert_array_equal(decoder.get_int_array("labels"), labels)

    def test_mixed_data_types(self):
        """Test encoding multiple data types."""
        encoder = BinaryEncoder()
        encoder.add_int("shots", 1000)
        encoder.add_float("sigma", 0.05, double_precision=True)
        encoder.add_string("tone_set", "three-tone")
        encoder.add_float_array("pulled", [6.4685, 6.4682])

        decoder = BinaryDecoder(encoder.to_bytes(), encoder.get_key_map())
        all_data = decoder.get_all()
        assert set(all_data) == {"shots", "sigma", "tone_set", "pulled"}
        assert decoder.get_int("shots") == 1000
        assert decoder.get_float("sigma") == 0.05

    def test_unknown_key_names(self):
        """Test that fields without a known key are named by their hash."""
        encoder = BinaryEncoder()
        encoder.add_int("secret", 3)
        decoder = BinaryDecoder(encoder.to_bytes())
        assert decoder.get_all() == {f"field_{key_hash('secret'):08x}": 3}

    def test_missing_key(self):
        """Test that absent keys decode to None."""
        decoder = BinaryDecoder(b"")
        assert decoder.get_int("missing") is None
        assert decoder.get_float_array("missing") is None

    def test_truncated_data(self):
        """Test that truncated payloads are rejected."""
        encoder = BinaryEncoder()
        encoder.add_float_array("values", [1.0, 2.0, 3.0])
        data = encoder.to_bytes()
        with pytest.raises(ValueError):
            BinaryDecoder(data[:-4])
        with pytest.raises(ValueError):
            BinaryDecoder(data[:3])

    def test_unknown_type(self):
        """Test that an unknown type id is rejected."""
        data = struct.pack(">IB", key_hash("x"), 99) + b"\x00"
        with pytest.raises(ValueError):
            BinaryDecoder(data)

    @given(st.floats(allow_nan=False, allow_infinity=False))
    def test_any_double(self, value):
        """Test that any finite double survives encoding.

        Args:
            value: Hypothesis-provided float.
        """
        encoder = BinaryEncoder()
        encoder.add_float("v", value, double_precision=True)
        decoder = BinaryDecoder(encoder.to_bytes(), keys=["v"])
        assert decoder.get_float("v") == value
