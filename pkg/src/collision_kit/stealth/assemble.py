"""Assembly of equal-size, equal-digest file pairs.

Every output is ``content || collision suffix || fill`` where the fill is the
same on both sides, so equal chaining values after the suffix stay equal
through the fill and MD5 padding.
"""

from __future__ import annotations

import logging
from collections.abc import Callable

import numpy as np

from collision_kit.engine.base import CollisionEngine
from collision_kit.engine.bundle import bundle_collides, bundle_suffixes
from collision_kit.engine.models import IPC_SUFFIX_LEN, CpcSuffixBundle, PrefixContext
from collision_kit.exceptions import (
    BundleMismatchError,
    CollisionVerificationError,
    StealthError,
    TargetSizeError,
)
from collision_kit.md5.core import digest_stream
from collision_kit.md5.models import BLOCK_SIZE
from collision_kit.stealth.models import (
    FILL_POLICIES,
    FILL_RANDOM,
    FILL_ZEROS,
    StealthManifest,
    StealthPair,
)
from collision_kit.stealth.weights import parse_weights, quantize_weights

logger = logging.getLogger(__name__)

DEFAULT_MIN_FREED = 1024

BundleSource = CpcSuffixBundle | Callable[[bytes, bytes], CpcSuffixBundle]


def align_prefix(data: bytes) -> bytes:
    """``data`` zero-padded to a whole number of blocks."""
    return data + bytes(-len(data) % BLOCK_SIZE)


def make_fill(length: int, fill_policy: str = FILL_RANDOM, seed: int = 0) -> bytes:
    if fill_policy == FILL_ZEROS:
        return bytes(length)
    if fill_policy == FILL_RANDOM:
        return np.random.default_rng(seed).bytes(length)
    raise StealthError(f"Unknown fill policy {fill_policy!r}, expected one of {FILL_POLICIES}")


def pad_to_size(data: bytes, target: int, fill_policy: str = FILL_RANDOM, seed: int = 0) -> bytes:
    """Append ``target - len(data)`` fill bytes; the fill depends only on length, policy and seed."""
    if len(data) > target:
        raise TargetSizeError(f"Content of {len(data)} bytes exceeds target size {target}")
    return data + make_fill(target - len(data), fill_policy, seed)


def _finish(
    col_c: bytes,
    col_p: bytes,
    target_size: int,
    mode: str,
    suffix_lens: tuple[int, int],
    pad_length: int,
    fill_policy: str,
    seed: int,
    collision_offset: int,
) -> StealthPair:
    digest_c = digest_stream([col_c], backend="hashlib")
    digest_p = digest_stream([col_p], backend="hashlib")
    if digest_c != digest_p or len(col_c) != len(col_p) or len(col_c) != target_size:
        raise CollisionVerificationError(
            f"Assembled {mode} pair does not verify: {digest_c} vs {digest_p}, "
            f"sizes {len(col_c)} and {len(col_p)}"
        )
    manifest = StealthManifest(
        original_size=target_size,
        digest=digest_c.hex,
        mode=mode,
        suffix_len_a=suffix_lens[0],
        suffix_len_b=suffix_lens[1],
        pad_length=pad_length,
        fill_policy=fill_policy,
        seed=seed,
        collision_offset=collision_offset,
    )
    logger.info(f"Assembled {mode} pair: {target_size} bytes, md5 {digest_c.hex}, pad {pad_length}")
    return StealthPair(col_c, col_p, manifest)


def assemble_ipc_demo(
    payload: bytes,
    engine: CollisionEngine,
    target_size: int,
    seed: int = 0,
    fill_policy: str = FILL_RANDOM,
) -> StealthPair:
    """Two files of ``target_size`` bytes sharing ``payload`` and one MD5.

    The payload is block aligned, an identical-prefix suffix pair is appended
    and both sides get the same fill.

    Raises:
        TargetSizeError: ``target_size`` is below the aligned payload plus 128 bytes.
        SearchBudgetExhausted: The engine found no pair.
    """
    prefix = align_prefix(payload)
    required = len(prefix) + IPC_SUFFIX_LEN
    if target_size < required:
        raise TargetSizeError(f"Target size {target_size} is below the required {required} bytes")
    pair = engine.find_ipc(PrefixContext.from_prefix(prefix), seed)
    pad_length = target_size - required
    fill = make_fill(pad_length, fill_policy, seed)
    return _finish(
        prefix + pair.s_a + fill,
        prefix + pair.s_b + fill,
        target_size,
        "ipc",
        (len(pair.s_a), len(pair.s_b)),
        pad_length,
        fill_policy,
        seed,
        collision_offset=len(prefix),
    )


def assemble_cpc(
    clean_c: bytes,
    poisoned_c: bytes,
    bundle: CpcSuffixBundle,
    target_size: int,
    seed: int = 0,
    fill_policy: str = FILL_RANDOM,
) -> StealthPair:
    """``clean_c || S_r || S_b || S_c || T`` and the poisoned counterpart.

    Raises:
        BundleMismatchError: The bundle does not collide for these inputs, or the
            two assembled sides differ in length.
        TargetSizeError: The assembled content exceeds ``target_size``.
    """
    if not bundle_collides(bundle, clean_c, poisoned_c):
        raise BundleMismatchError("Bundle does not collide for the given prefixes")
    suffix_a, suffix_b = bundle_suffixes(bundle)
    body_c, body_p = clean_c + suffix_a, poisoned_c + suffix_b
    if len(body_c) != len(body_p):
        raise BundleMismatchError(
            f"Assembled sides differ in length: {len(body_c)} vs {len(body_p)} bytes"
        )
    if len(body_c) > target_size:
        raise TargetSizeError(f"Assembled {len(body_c)} bytes exceed target size {target_size}")
    pad_length = target_size - len(body_c)
    fill = make_fill(pad_length, fill_policy, seed)
    return _finish(
        body_c + fill,
        body_p + fill,
        target_size,
        "cpc",
        (len(suffix_a), len(suffix_b)),
        pad_length,
        fill_policy,
        seed,
        collision_offset=min(len(clean_c), len(poisoned_c)),
    )


def enhance_pair(
    clean: bytes,
    poisoned: bytes,
    bundle_source: BundleSource,
    min_bytes_freed: int = DEFAULT_MIN_FREED,
    fill_policy: str = FILL_RANDOM,
    seed: int = 0,
) -> StealthPair:
    """Compress both weight files, attach CPC suffixes and pad back to the clean size.

    ``bundle_source`` is either a ready bundle or a callable receiving the two
    compressed files and returning one.
    """
    target_size = len(clean)
    clean_c = quantize_weights(parse_weights(clean), min_bytes_freed).new_file
    poisoned_c = quantize_weights(parse_weights(poisoned), min_bytes_freed).new_file
    logger.debug(f"Compressed inputs to {len(clean_c)} and {len(poisoned_c)} bytes")
    bundle = bundle_source(clean_c, poisoned_c) if callable(bundle_source) else bundle_source
    return assemble_cpc(clean_c, poisoned_c, bundle, target_size, seed, fill_policy)
