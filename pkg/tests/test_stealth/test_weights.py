"""Tests for the TWC1 container and f32 -> f16 quantization."""

import struct

import numpy as np
import pytest

from collision_kit.exceptions import InsufficientCapacityError, WeightFileFormatError
from collision_kit.stealth.models import DTYPE_F16, DTYPE_F32, QuantizedSpan, Tensor, ToyWeightFile
from collision_kit.stealth.weights import (
    dequantize_span,
    make_toy_weights,
    parse_weights,
    quantize_weights,
    serialize_weights,
)


def test_toy_weights_round_trip():
    data = make_toy_weights([16, 300, 768], seed=3)
    parsed = parse_weights(data)
    assert [t.count for t in parsed.tensors] == [16, 300, 768]
    assert all(t.dtype == DTYPE_F32 for t in parsed.tensors)
    assert serialize_weights(parsed) == data


def test_toy_weights_deterministic_and_on_grid():
    assert make_toy_weights([64], seed=1) == make_toy_weights([64], seed=1)
    assert make_toy_weights([64], seed=1) != make_toy_weights([64], seed=2)
    values = dequantize_span(parse_weights(make_toy_weights([4096], seed=0)), 0)
    assert np.all(values * 128 == np.rint(values * 128))
    assert np.abs(values).max() < 1.0


def test_bad_magic():
    with pytest.raises(WeightFileFormatError, match="Bad magic"):
        parse_weights(b"XXXX" + bytes(4))


def test_truncated_payload():
    data = make_toy_weights([8])
    with pytest.raises(WeightFileFormatError, match="file ends early"):
        parse_weights(data[:-1])


def test_unknown_dtype():
    data = b"TWC1" + struct.pack("<I", 1) + struct.pack("<BQ", 7, 0)
    with pytest.raises(WeightFileFormatError, match="Unknown dtype"):
        parse_weights(data)


def test_trailing_bytes():
    with pytest.raises(WeightFileFormatError, match="trailing bytes"):
        parse_weights(make_toy_weights([4]) + b"\x00")


def test_serialize_rejects_wrong_payload_length():
    with pytest.raises(WeightFileFormatError):
        serialize_weights(ToyWeightFile([Tensor(DTYPE_F32, 2, bytes(4))]))


def test_quantize_768_elements_frees_1536_bytes():
    data = make_toy_weights([1000, 768], seed=0)
    outcome = quantize_weights(parse_weights(data), 1536)
    assert outcome.bytes_freed == 1536
    assert len(data) - len(outcome.new_file) == 1536
    assert outcome.manifest == [QuantizedSpan(1, 768)]
    assert outcome.header_bytes == 0
    quantized = parse_weights(outcome.new_file)
    assert quantized.tensors[1].dtype == DTYPE_F16
    assert quantized.tensors[0] == parse_weights(data).tensors[0]


def test_quantize_zero_is_identity():
    data = make_toy_weights([10])
    outcome = quantize_weights(parse_weights(data), 0)
    assert outcome.new_file == data
    assert outcome.bytes_freed == 0
    assert outcome.manifest == []


def test_one_quantizes_exactly():
    payload = np.array([1.0, -2.5, 0.0], dtype="<f4").tobytes()
    file = ToyWeightFile([Tensor(DTYPE_F32, 3, payload)])
    outcome = quantize_weights(file, 6)
    values = dequantize_span(parse_weights(outcome.new_file), 0)
    assert values.tolist() == [1.0, -2.5, 0.0]


def test_quantize_spans_several_tensors():
    outcome = quantize_weights(parse_weights(make_toy_weights([500, 300, 200])), 1000)
    assert outcome.bytes_freed == 1000
    assert outcome.manifest == [QuantizedSpan(2, 200), QuantizedSpan(1, 300)]
    assert sum(2 * span.elements for span in outcome.manifest) == outcome.bytes_freed


def test_partial_tensor_is_split():
    data = make_toy_weights([100, 1000], seed=4)
    outcome = quantize_weights(parse_weights(data), 100)
    assert outcome.bytes_freed == 100
    assert outcome.manifest == [QuantizedSpan(1, 50)]
    assert outcome.header_bytes == 9
    assert len(data) - len(outcome.new_file) == 100 - 9
    tensors = parse_weights(outcome.new_file).tensors
    assert [(t.dtype, t.count) for t in tensors] == [
        (DTYPE_F32, 100),
        (DTYPE_F32, 950),
        (DTYPE_F16, 50),
    ]
    original = parse_weights(data).tensors[1].payload
    assert tensors[1].payload == original[: 950 * 4]


def test_quantization_error_bound():
    rng = np.random.default_rng(7)
    values = rng.normal(0.0, 3.0, 2048).astype("<f4")
    values = values[np.abs(values) > 2.0**-14]
    file = ToyWeightFile([Tensor(DTYPE_F32, len(values), values.tobytes())])
    outcome = quantize_weights(file, 2 * len(values))
    back = dequantize_span(parse_weights(outcome.new_file), 0)
    assert np.all(np.abs(back - values) <= 2.0**-11 * np.abs(values))


def test_insufficient_capacity():
    with pytest.raises(InsufficientCapacityError, match="only 10 f32 elements"):
        quantize_weights(parse_weights(make_toy_weights([10])), 21)


def test_already_half_precision_is_not_capacity():
    file = ToyWeightFile([Tensor(DTYPE_F16, 100, bytes(200))])
    with pytest.raises(InsufficientCapacityError):
        quantize_weights(file, 2)


def test_freeing_1536_from_single_tensor_converts_768():
    data = make_toy_weights([1000], seed=2)
    outcome = quantize_weights(parse_weights(data), 1536)
    assert outcome.manifest == [QuantizedSpan(0, 768)]
    assert outcome.bytes_freed == 1536
    tensors = parse_weights(outcome.new_file).tensors
    assert [(t.dtype, t.count) for t in tensors] == [(DTYPE_F32, 232), (DTYPE_F16, 768)]
    assert len(data) - len(outcome.new_file) == 1536 - outcome.header_bytes


def test_odd_request_rounds_up_one_element():
    outcome = quantize_weights(parse_weights(make_toy_weights([40, 3])), 7)
    assert outcome.manifest == [QuantizedSpan(1, 3), QuantizedSpan(0, 1)]
    assert outcome.bytes_freed == 8
