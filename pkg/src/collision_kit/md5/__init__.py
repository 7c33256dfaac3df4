"""Native MD5 with the compression function and chaining state exposed."""

from collision_kit.md5.core import (
    IHV0,
    MESSAGE_INDEX,
    ROTATIONS,
    ROUND_CONSTANTS,
    Md5,
    chain,
    compress,
    digest,
    digest_stream,
    file_digest,
    iter_file,
    new_hasher,
    padding,
    rotl,
    rotr,
    round_function,
)
from collision_kit.md5.models import BLOCK_SIZE, Digest, IhvState, MessageBlock

__all__ = [
    "BLOCK_SIZE",
    "IHV0",
    "MESSAGE_INDEX",
    "ROTATIONS",
    "ROUND_CONSTANTS",
    "Digest",
    "IhvState",
    "Md5",
    "MessageBlock",
    "chain",
    "compress",
    "digest",
    "digest_stream",
    "file_digest",
    "iter_file",
    "new_hasher",
    "padding",
    "rotl",
    "rotr",
    "round_function",
]
