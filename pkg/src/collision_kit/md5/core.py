"""Bit-exact MD5 with the compression function and chaining value exposed.

``digest`` and ``digest_stream`` run the native compression function so every
byte of the result is produced by code the collision engine also relies on.
Bulk artifact hashing may opt into the ``hashlib`` backend, which tests keep
cross-checked against the native path.
"""

from __future__ import annotations

import hashlib
import logging
import math
import os
import struct
from collections.abc import Iterable, Iterator
from pathlib import Path

from collision_kit.exceptions import BlockAlignmentError, InvalidBlockError
from collision_kit.md5.models import BLOCK_SIZE, WORD_MASK, Digest, IhvState, MessageBlock

logger = logging.getLogger(__name__)

IHV0 = IhvState(0x67452301, 0xEFCDAB89, 0x98BADCFE, 0x10325476)

ROUND_CONSTANTS: tuple[int, ...] = tuple(
    int(abs(math.sin(i + 1)) * 2**32) & WORD_MASK for i in range(64)
)
ROTATIONS: tuple[int, ...] = (
    (7, 12, 17, 22) * 4 + (5, 9, 14, 20) * 4 + (4, 11, 16, 23) * 4 + (6, 10, 15, 21) * 4
)
MESSAGE_INDEX: tuple[int, ...] = (
    tuple(range(16))
    + tuple((5 * i + 1) % 16 for i in range(16))
    + tuple((3 * i + 5) % 16 for i in range(16))
    + tuple((7 * i) % 16 for i in range(16))
)

# "native" or "hashlib"; used by callers hashing whole artifacts.
DEFAULT_FILE_BACKEND = os.environ.get("COLLISION_KIT_MD5_BACKEND", "hashlib")
DEFAULT_CHUNK_SIZE = 4 * 1024 * 1024


def rotl(x: int, n: int) -> int:
    x &= WORD_MASK
    return ((x << n) | (x >> (32 - n))) & WORD_MASK


def rotr(x: int, n: int) -> int:
    x &= WORD_MASK
    return ((x >> n) | (x << (32 - n))) & WORD_MASK


def round_function(step: int, x: int, y: int, z: int) -> int:
    """The boolean function of the round containing ``step``."""
    if step < 16:
        return (x & y) | (~x & z)
    if step < 32:
        return (x & z) | (y & ~z)
    if step < 48:
        return x ^ y ^ z
    return (y ^ (x | (~z & WORD_MASK))) & WORD_MASK


def _compress_words(a: int, b: int, c: int, d: int, m: tuple[int, ...]) -> tuple[int, int, int, int]:
    aa, bb, cc, dd = a, b, c, d
    for i in range(64):
        if i < 16:
            f = (b & c) | (~b & d)
        elif i < 32:
            f = (d & b) | (~d & c)
        elif i < 48:
            f = b ^ c ^ d
        else:
            f = c ^ (b | (~d & WORD_MASK))
        f = (f + a + ROUND_CONSTANTS[i] + m[MESSAGE_INDEX[i]]) & WORD_MASK
        s = ROTATIONS[i]
        a, d, c = d, c, b
        b = (b + ((f << s) | (f >> (32 - s)))) & WORD_MASK
    return (
        (aa + a) & WORD_MASK,
        (bb + b) & WORD_MASK,
        (cc + c) & WORD_MASK,
        (dd + d) & WORD_MASK,
    )


def compress(state: IhvState, block: MessageBlock | bytes) -> IhvState:
    """One MD5 compression: 64 steps plus the Davies-Meyer feed-forward."""
    if not isinstance(block, MessageBlock):
        block = MessageBlock(bytes(block))
    return IhvState(*_compress_words(state.a, state.b, state.c, state.d, block.words()))


def chain(state: IhvState, data: bytes) -> IhvState:
    """Fold ``compress`` over consecutive 64-byte blocks without padding."""
    if len(data) % BLOCK_SIZE:
        raise BlockAlignmentError(
            f"chain needs a multiple of {BLOCK_SIZE} bytes, got {len(data)}"
        )
    a, b, c, d = state.words()
    for offset in range(0, len(data), BLOCK_SIZE):
        m = struct.unpack_from("<16I", data, offset)
        a, b, c, d = _compress_words(a, b, c, d, m)
    return IhvState(a, b, c, d)


def padding(message_length: int) -> bytes:
    """0x80, zeros, then the 64-bit little-endian bit length."""
    zeros = (55 - message_length) % BLOCK_SIZE
    return b"\x80" + b"\x00" * zeros + struct.pack("<Q", (message_length * 8) & (2**64 - 1))


class Md5:
    """Incremental native MD5 whose chaining value can be inspected at any block boundary."""

    def __init__(self, state: IhvState = IHV0, length: int = 0) -> None:
        if length % BLOCK_SIZE:
            raise BlockAlignmentError("Resumed length must be block aligned")
        self._state = state
        self._length = length
        self._buffer = b""

    @property
    def state(self) -> IhvState:
        """Chaining value after the last complete block absorbed."""
        return self._state

    @property
    def length(self) -> int:
        return self._length + len(self._buffer)

    def update(self, data: bytes) -> None:
        if not data:
            return
        buffered = self._buffer + bytes(data)
        whole = len(buffered) - len(buffered) % BLOCK_SIZE
        if whole:
            self._state = chain(self._state, buffered[:whole])
            self._length += whole
        self._buffer = buffered[whole:]

    def digest(self) -> Digest:
        tail = self._buffer + padding(self.length)
        return Digest(chain(self._state, tail).to_bytes())

    def hexdigest(self) -> str:
        return self.digest().hex


def digest(data: bytes) -> Digest:
    """Standard MD5 of ``data``."""
    hasher = Md5()
    hasher.update(data)
    return hasher.digest()


class _HashlibMd5:
    def __init__(self) -> None:
        self._md5 = hashlib.md5()

    def update(self, data: bytes) -> None:
        self._md5.update(data)

    def digest(self) -> Digest:
        return Digest(self._md5.digest())


def new_hasher(backend: str = "native") -> Md5 | _HashlibMd5:
    """An incremental MD5 (``update`` then ``digest``) on the given backend."""
    if backend == "native":
        return Md5()
    if backend == "hashlib":
        return _HashlibMd5()
    raise InvalidBlockError(f"Unknown MD5 backend: {backend}")


def digest_stream(chunks: Iterable[bytes], backend: str = "native") -> Digest:
    """MD5 of the concatenation of ``chunks`` without buffering them all."""
    hasher = new_hasher(backend)
    for chunk in chunks:
        hasher.update(chunk)
    return hasher.digest()


def iter_file(path: Path | str, chunk_size: int = DEFAULT_CHUNK_SIZE) -> Iterator[bytes]:
    with open(path, "rb") as fh:
        while chunk := fh.read(chunk_size):
            yield chunk


def file_digest(path: Path | str, backend: str | None = None) -> Digest:
    """Streaming digest of a file using the configured artifact backend."""
    use_backend = backend or DEFAULT_FILE_BACKEND
    result = digest_stream(iter_file(path), backend=use_backend)
    logger.debug(f"md5({path}) = {result.hex} via {use_backend}")
    return result
