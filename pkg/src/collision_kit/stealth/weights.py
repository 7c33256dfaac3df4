"""TWC1 toy weight container and f32 -> f16 space freeing.

Layout (little-endian): magic ``TWC1``, tensor count u32, then per tensor a
dtype tag u8 (0 = f32, 1 = f16), element count u64 and the raw payload.
"""

from __future__ import annotations

import logging
import struct

import numpy as np

from collision_kit.exceptions import InsufficientCapacityError, WeightFileFormatError
from collision_kit.stealth.models import (
    DTYPE_F16,
    DTYPE_F32,
    DTYPE_SIZES,
    CompressionOutcome,
    QuantizedSpan,
    Tensor,
    ToyWeightFile,
)

logger = logging.getLogger(__name__)

MAGIC = b"TWC1"
_COUNT = struct.Struct("<I")
_RECORD = struct.Struct("<BQ")

# Toy values are k / TOY_SCALE for integer k in [-TOY_LEVELS, TOY_LEVELS].
TOY_SCALE = 128
TOY_LEVELS = 127
TOY_SPREAD = 24.0


def parse_weights(data: bytes) -> ToyWeightFile:
    if data[:4] != MAGIC:
        raise WeightFileFormatError("Bad magic: not a TWC1 weight file")
    if len(data) < 4 + _COUNT.size:
        raise WeightFileFormatError("Truncated TWC1 header")
    (count,) = _COUNT.unpack_from(data, 4)
    pos = 4 + _COUNT.size
    tensors = []
    for i in range(count):
        if pos + _RECORD.size > len(data):
            raise WeightFileFormatError(f"Truncated record header of tensor {i}")
        dtype, elements = _RECORD.unpack_from(data, pos)
        pos += _RECORD.size
        if dtype not in DTYPE_SIZES:
            raise WeightFileFormatError(f"Unknown dtype tag {dtype} in tensor {i}")
        size = elements * DTYPE_SIZES[dtype]
        if pos + size > len(data):
            raise WeightFileFormatError(f"Tensor {i} declares {size} bytes, file ends early")
        tensors.append(Tensor(dtype, elements, data[pos : pos + size]))
        pos += size
    if pos != len(data):
        raise WeightFileFormatError(f"{len(data) - pos} trailing bytes after tensor {count - 1}")
    return ToyWeightFile(tensors)


def serialize_weights(file: ToyWeightFile) -> bytes:
    parts = [MAGIC, _COUNT.pack(len(file.tensors))]
    for tensor in file.tensors:
        if len(tensor.payload) != tensor.count * DTYPE_SIZES[tensor.dtype]:
            raise WeightFileFormatError(
                f"Payload of {len(tensor.payload)} bytes does not match "
                f"{tensor.count} elements of dtype {tensor.dtype}"
            )
        parts += [_RECORD.pack(tensor.dtype, tensor.count), tensor.payload]
    return b"".join(parts)


def make_toy_weights(tensor_sizes: list[int], seed: int = 0) -> bytes:
    """A TWC1 file of f32 tensors drawn from an int8-style grid around zero.

    Values are exact in both f32 and f16, so differently seeded files share
    one small vocabulary of 2-byte tokens.
    """
    rng = np.random.default_rng(seed)
    tensors = []
    for size in tensor_sizes:
        levels = np.clip(np.rint(rng.normal(0.0, TOY_SPREAD, size)), -TOY_LEVELS, TOY_LEVELS)
        values = (levels / TOY_SCALE).astype("<f4")
        tensors.append(Tensor(DTYPE_F32, size, values.tobytes()))
    return serialize_weights(ToyWeightFile(tensors))


def _to_half(payload: bytes) -> bytes:
    return np.frombuffer(payload, dtype="<f4").astype("<f2").tobytes()


def quantize_weights(file: ToyWeightFile, min_bytes_freed: int) -> CompressionOutcome:
    """Convert the fewest trailing f32 elements to f16 to free ``min_bytes_freed``.

    Each converted element frees two payload bytes, so exactly
    ``ceil(min_bytes_freed / 2)`` elements are converted. Tensors are taken
    from the end. A tensor converted whole only changes its dtype tag; a partly
    converted one is split into an f32 head and a new f16 record for its tail.
    That record header is reported in ``header_bytes`` and the file shrinks by
    ``bytes_freed - header_bytes``.

    Raises:
        InsufficientCapacityError: Converting every f32 element frees too little.
    """
    original = serialize_weights(file)
    if min_bytes_freed <= 0:
        return CompressionOutcome(original, 0, [])
    capacity = 2 * file.f32_elements
    if capacity < min_bytes_freed:
        raise InsufficientCapacityError(
            f"Need {min_bytes_freed} bytes but the file has only {file.f32_elements} f32 elements "
            f"({capacity} bytes at most)"
        )

    tensors = list(file.tensors)
    spans: list[QuantizedSpan] = []
    remaining = -(-min_bytes_freed // 2)
    for index in range(len(tensors) - 1, -1, -1):
        tensor = tensors[index]
        if tensor.dtype != DTYPE_F32 or tensor.count == 0:
            continue
        take = min(remaining, tensor.count)
        if take == tensor.count:
            tensors[index] = Tensor(DTYPE_F16, tensor.count, _to_half(tensor.payload))
        else:
            split = (tensor.count - take) * 4
            tensors[index : index + 1] = [
                Tensor(DTYPE_F32, tensor.count - take, tensor.payload[:split]),
                Tensor(DTYPE_F16, take, _to_half(tensor.payload[split:])),
            ]
        spans.append(QuantizedSpan(index, take))
        remaining -= take
        if not remaining:
            break

    new_file = serialize_weights(ToyWeightFile(tensors))
    elements = sum(span.elements for span in spans)
    header_bytes = len(new_file) - len(original) + 2 * elements
    logger.info(
        f"Quantized {elements} elements, freed {2 * elements} payload bytes "
        f"({header_bytes} spent on record headers)"
    )
    return CompressionOutcome(new_file, 2 * elements, spans, header_bytes)


def dequantize_span(file: ToyWeightFile, index: int) -> np.ndarray:
    """Values of tensor ``index`` as float32, whatever its stored dtype."""
    tensor = file.tensors[index]
    dtype = "<f4" if tensor.dtype == DTYPE_F32 else "<f2"
    return np.frombuffer(tensor.payload, dtype=dtype).astype(np.float32)
