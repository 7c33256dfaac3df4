"""Data models for the collision engine."""

from __future__ import annotations

from dataclasses import dataclass

from collision_kit.exceptions import BlockAlignmentError, BundleParameterError
from collision_kit.md5.core import IHV0, chain
from collision_kit.md5.models import BLOCK_SIZE, Digest, IhvState

IPC_SUFFIX_LEN = 2 * BLOCK_SIZE
MAX_K = 32


@dataclass(frozen=True)
class PrefixContext:
    """Chaining value after a block-aligned prefix."""

    state: IhvState
    prefix_len_bytes: int = 0

    def __post_init__(self) -> None:
        if self.prefix_len_bytes < 0 or self.prefix_len_bytes % BLOCK_SIZE:
            raise BlockAlignmentError(
                f"Prefix length {self.prefix_len_bytes} is not a multiple of {BLOCK_SIZE}"
            )

    @classmethod
    def from_prefix(cls, prefix: bytes) -> PrefixContext:
        return cls(chain(IHV0, prefix), len(prefix))


@dataclass(frozen=True)
class IpcSuffixPair:
    """Two 128-byte suffixes that collide after the same prefix."""

    s_a: bytes
    s_b: bytes
    found_after: int = 0


@dataclass(frozen=True)
class BitString:
    """A bit string of explicit length; bits beyond ``length`` in the last byte are zero."""

    length: int
    data: bytes

    def __post_init__(self) -> None:
        if len(self.data) != (self.length + 7) // 8:
            raise BundleParameterError(
                f"Bit string of {self.length} bits needs {(self.length + 7) // 8} bytes, "
                f"got {len(self.data)}"
            )


@dataclass(frozen=True)
class CpcSide:
    """One side's sub-suffixes: padding bits, birthday bits and near-collision blocks."""

    s_r: BitString
    s_b: BitString
    s_c: tuple[bytes, ...]

    def suffix(self) -> bytes:
        """S_r || S_b || S_c as bytes; S_r and S_b together must end on a byte boundary."""
        bits = self.s_r.length + self.s_b.length
        if bits % 8:
            raise BundleParameterError(f"S_r and S_b span {bits} bits, not whole bytes")
        return _concat_bits([self.s_r, self.s_b]) + b"".join(self.s_c)


def _concat_bits(parts: list[BitString]) -> bytes:
    value = 0
    total = 0
    for part in parts:
        as_int = int.from_bytes(part.data, "big") >> (len(part.data) * 8 - part.length)
        value = (value << part.length) | as_int
        total += part.length
    return value.to_bytes(total // 8, "big") if total else b""


@dataclass(frozen=True)
class CpcSuffixBundle:
    """Chosen-prefix suffixes for prefixes P (side A) and P' (side B)."""

    k: int
    side_a: CpcSide
    side_b: CpcSide
    prefix_digest_a: Digest | None = None
    prefix_digest_b: Digest | None = None

    def __post_init__(self) -> None:
        if not 0 < self.k < MAX_K:
            raise BundleParameterError(f"k must satisfy 0 < k < {MAX_K}, got {self.k}")
        for name, side in (("A", self.side_a), ("B", self.side_b)):
            if side.s_b.length != 64 + self.k:
                raise BundleParameterError(
                    f"S_b of side {name} has {side.s_b.length} bits, expected {64 + self.k}"
                )
            for block in side.s_c:
                if len(block) != BLOCK_SIZE:
                    raise BundleParameterError(f"S_c block of side {name} is not 64 bytes")
        if len(self.side_a.s_c) != len(self.side_b.s_c):
            raise BundleParameterError(
                f"Mismatched r: {len(self.side_a.s_c)} vs {len(self.side_b.s_c)} blocks"
            )

    @property
    def r(self) -> int:
        return len(self.side_a.s_c)


@dataclass(frozen=True)
class CollisionReport:
    """Digest, size and first-difference comparison of two files."""

    md5_equal: bool
    size_equal: bool
    first_diff_offset: int | None
    digest_a: Digest
    digest_b: Digest
    size_a: int = 0
    size_b: int = 0

    @property
    def is_collision(self) -> bool:
        """Equal digests over different bytes."""
        return self.md5_equal and self.first_diff_offset is not None
