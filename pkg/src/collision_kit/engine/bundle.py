"""CPCS container for externally produced chosen-prefix suffix bundles.

Layout (little-endian): magic ``CPCS``, version u16, k u16, r u16, flags u16;
if flag bit 0 is set, the 16-byte MD5 digests of prefix A and prefix B follow.
Then for side A and side B: S_r bit length u32 and bytes, S_b bit length u32
and bytes, r blocks of 64 bytes. The file ends with the MD5 of everything
before it.
"""

from __future__ import annotations

import logging
import struct
from pathlib import Path

from collision_kit.engine.models import BitString, CpcSide, CpcSuffixBundle
from collision_kit.exceptions import BundleFormatError, BundleParameterError
from collision_kit.md5.core import IHV0, chain, digest
from collision_kit.md5.models import BLOCK_SIZE, DIGEST_SIZE, Digest

logger = logging.getLogger(__name__)

MAGIC = b"CPCS"
VERSION = 1
FLAG_PREFIX_DIGESTS = 0x1
_HEADER = struct.Struct("<4sHHHH")


class _Reader:
    def __init__(self, data: bytes) -> None:
        self.data = data
        self.pos = 0

    def take(self, n: int, what: str) -> bytes:
        if self.pos + n > len(self.data):
            raise BundleFormatError(f"Truncated bundle: {what} needs {n} bytes at {self.pos}")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def bits(self, what: str) -> BitString:
        (length,) = struct.unpack("<I", self.take(4, f"{what} length"))
        return BitString(length, self.take((length + 7) // 8, what))


def parse_cpc_bundle(data: bytes) -> CpcSuffixBundle:
    """Parse CPCS bytes; every length and the trailing checksum are checked."""
    if len(data) < 4 or data[:4] != MAGIC:
        raise BundleFormatError("Bad magic: not a CPCS bundle")
    if len(data) < _HEADER.size + DIGEST_SIZE:
        raise BundleFormatError("Truncated bundle header")
    body, checksum = data[:-DIGEST_SIZE], data[-DIGEST_SIZE:]
    if digest(body).data != checksum:
        raise BundleFormatError("Bundle checksum mismatch")

    reader = _Reader(body)
    _, version, k, r, flags = _HEADER.unpack(reader.take(_HEADER.size, "header"))
    if version != VERSION:
        raise BundleFormatError(f"Unsupported CPCS version {version}")
    if flags & ~FLAG_PREFIX_DIGESTS:
        raise BundleFormatError(f"Reserved CPCS flag bits set: {flags:#06x}")

    digests: list[Digest | None] = [None, None]
    if flags & FLAG_PREFIX_DIGESTS:
        digests = [Digest(reader.take(DIGEST_SIZE, "prefix digest")) for _ in range(2)]

    sides = []
    for name in ("A", "B"):
        s_r = reader.bits(f"S_r of side {name}")
        s_b = reader.bits(f"S_b of side {name}")
        s_c = tuple(reader.take(BLOCK_SIZE, f"S_c block of side {name}") for _ in range(r))
        sides.append(CpcSide(s_r, s_b, s_c))
    if reader.pos != len(body):
        raise BundleFormatError(f"{len(body) - reader.pos} unexpected bytes after side B")

    bundle = CpcSuffixBundle(k, sides[0], sides[1], digests[0], digests[1])
    logger.debug(f"Parsed CPCS bundle k={k} r={r}")
    return bundle


def ingest_cpc_bundle(path: Path | str) -> CpcSuffixBundle:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise BundleFormatError(f"Reading bundle {path} failed: {e}") from e
    return parse_cpc_bundle(data)


def serialize_cpc_bundle(bundle: CpcSuffixBundle) -> bytes:
    flags = 0
    parts = []
    if bundle.prefix_digest_a is not None and bundle.prefix_digest_b is not None:
        flags |= FLAG_PREFIX_DIGESTS
        parts += [bundle.prefix_digest_a.data, bundle.prefix_digest_b.data]
    for side in (bundle.side_a, bundle.side_b):
        for bits in (side.s_r, side.s_b):
            parts += [struct.pack("<I", bits.length), bits.data]
        parts += list(side.s_c)
    body = _HEADER.pack(MAGIC, VERSION, bundle.k, bundle.r, flags) + b"".join(parts)
    return body + digest(body).data


def write_cpc_bundle(bundle: CpcSuffixBundle, path: Path | str) -> None:
    Path(path).write_bytes(serialize_cpc_bundle(bundle))
    logger.info(f"Wrote CPCS bundle k={bundle.k} r={bundle.r} to {path}")


def bundle_suffixes(bundle: CpcSuffixBundle) -> tuple[bytes, bytes]:
    """S_r || S_b || S_c of both sides as bytes."""
    return bundle.side_a.suffix(), bundle.side_b.suffix()


def bundle_collides(bundle: CpcSuffixBundle, prefix_a: bytes, prefix_b: bytes) -> bool:
    """Whether both prefixes reach the same chaining value after their suffixes."""
    try:
        suffix_a, suffix_b = bundle_suffixes(bundle)
    except BundleParameterError:
        return False
    tail_a, tail_b = prefix_a + suffix_a, prefix_b + suffix_b
    if len(tail_a) % BLOCK_SIZE or len(tail_b) % BLOCK_SIZE:
        return False
    return chain(IHV0, tail_a) == chain(IHV0, tail_b)
