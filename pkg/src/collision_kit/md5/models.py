"""Data models for the MD5 core."""

from __future__ import annotations

import struct
from dataclasses import dataclass

from collision_kit.exceptions import InvalidBlockError

BLOCK_SIZE = 64
DIGEST_SIZE = 16
WORD_MASK = 0xFFFFFFFF


@dataclass(frozen=True)
class IhvState:
    """The four-word MD5 chaining value (a, b, c, d)."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self) -> None:
        for name in ("a", "b", "c", "d"):
            value = getattr(self, name)
            if not 0 <= value <= WORD_MASK:
                raise InvalidBlockError(f"IHV word {name}={value!r} is not a 32-bit word")

    @classmethod
    def from_bytes(cls, data: bytes) -> IhvState:
        if len(data) != DIGEST_SIZE:
            raise InvalidBlockError(f"IHV needs {DIGEST_SIZE} bytes, got {len(data)}")
        return cls(*struct.unpack("<4I", data))

    def words(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def to_bytes(self) -> bytes:
        """Little-endian serialization; for a final state this is the digest."""
        return struct.pack("<4I", self.a, self.b, self.c, self.d)

    def difference(self, other: IhvState) -> tuple[int, int, int, int]:
        """Modular word-wise difference ``other - self``."""
        return (
            (other.a - self.a) & WORD_MASK,
            (other.b - self.b) & WORD_MASK,
            (other.c - self.c) & WORD_MASK,
            (other.d - self.d) & WORD_MASK,
        )


@dataclass(frozen=True)
class MessageBlock:
    """Exactly 64 bytes, read as sixteen little-endian 32-bit words."""

    data: bytes

    def __post_init__(self) -> None:
        if len(self.data) != BLOCK_SIZE:
            raise InvalidBlockError(f"Message block must be {BLOCK_SIZE} bytes, got {len(self.data)}")

    @classmethod
    def from_words(cls, words: list[int] | tuple[int, ...]) -> MessageBlock:
        if len(words) != 16:
            raise InvalidBlockError(f"Message block needs 16 words, got {len(words)}")
        return cls(struct.pack("<16I", *(w & WORD_MASK for w in words)))

    def words(self) -> tuple[int, ...]:
        return struct.unpack("<16I", self.data)


@dataclass(frozen=True)
class Digest:
    """A 16-byte MD5 checksum; text form is 32 lowercase hex characters."""

    data: bytes

    def __post_init__(self) -> None:
        if len(self.data) != DIGEST_SIZE:
            raise InvalidBlockError(f"Digest must be {DIGEST_SIZE} bytes, got {len(self.data)}")

    @classmethod
    def from_hex(cls, text: str) -> Digest:
        text = text.strip()
        if len(text) != 2 * DIGEST_SIZE:
            raise InvalidBlockError(f"Digest hex must be 32 characters, got {len(text)}")
        try:
            return cls(bytes.fromhex(text))
        except ValueError as e:
            raise InvalidBlockError(f"Invalid digest hex {text!r}: {e}") from e

    @property
    def hex(self) -> str:
        return self.data.hex()

    def __str__(self) -> str:
        return self.data.hex()
