"""Data models for the size-preserving collision pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field

DTYPE_F32 = 0
DTYPE_F16 = 1
DTYPE_SIZES = {DTYPE_F32: 4, DTYPE_F16: 2}

FILL_ZEROS = "zeros"
FILL_RANDOM = "seeded-random"
FILL_POLICIES = (FILL_ZEROS, FILL_RANDOM)


@dataclass(frozen=True)
class Tensor:
    """One TWC1 tensor record: dtype tag, element count and raw payload."""

    dtype: int
    count: int
    payload: bytes


@dataclass
class ToyWeightFile:
    """Parsed TWC1 container."""

    tensors: list[Tensor] = field(default_factory=list)

    @property
    def f32_elements(self) -> int:
        return sum(t.count for t in self.tensors if t.dtype == DTYPE_F32)


@dataclass(frozen=True)
class QuantizedSpan:
    """Trailing elements of a tensor converted from f32 to f16."""

    tensor_index: int
    elements: int


@dataclass(frozen=True)
class RemovedSpan:
    """A byte span of the original text, dropped or replaced by ``replacement``."""

    offset: int
    length: int
    replacement: bytes = b""

    @property
    def removed(self) -> int:
        return self.length - len(self.replacement)


@dataclass
class CompressionOutcome:
    new_file: bytes
    bytes_freed: int
    manifest: list[QuantizedSpan | RemovedSpan] = field(default_factory=list)
    # Bytes spent on record headers for split tensors.
    header_bytes: int = 0


@dataclass(frozen=True)
class StealthManifest:
    """Sidecar describing how an equal-size, equal-digest pair was assembled."""

    original_size: int
    digest: str
    mode: str
    suffix_len_a: int
    suffix_len_b: int
    pad_length: int
    fill_policy: str
    seed: int
    collision_offset: int


@dataclass(frozen=True)
class StealthPair:
    """Col(C) and Col(P): same size, same MD5."""

    col_c: bytes
    col_p: bytes
    manifest: StealthManifest
