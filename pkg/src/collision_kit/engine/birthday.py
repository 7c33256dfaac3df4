"""Chosen-prefix scaffolding: padding arithmetic, cost model and birthday search.

The birthday search looks for S_b, S_b' such that the chaining values after
``P || S_r || S_b`` and ``P' || S_r' || S_b'`` differ only in the form
(0, db, dc, dc): equal ``a`` and equal ``c - d``. It walks a pseudo-random
function over candidate bit strings and keeps only distinguished points
(those whose low ``dp_bits`` bits are zero). ``match_bits`` below 32 truncates
the compared words for reduced-strength runs.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from collision_kit.engine.models import MAX_K, BitString, PrefixContext
from collision_kit.exceptions import BundleParameterError
from collision_kit.md5.core import compress
from collision_kit.md5.models import BLOCK_SIZE, WORD_MASK, IhvState

logger = logging.getLogger(__name__)

DEFAULT_K = 4
DEFAULT_MAX_POINTS = 1 << 20
MAX_TRAIL_FACTOR = 20


def _check_k(k: int, allow_zero: bool = True) -> None:
    low = 0 if allow_zero else 1
    if not low <= k < MAX_K:
        raise BundleParameterError(f"k must satisfy {low} <= k < {MAX_K}, got {k}")


def padding_bits(prefix_len_bits: int, k: int) -> int:
    """Smallest L >= 0 with prefix_len_bits + L + 64 + k a multiple of 512."""
    _check_k(k)
    if prefix_len_bits < 0:
        raise BundleParameterError(f"Negative prefix length: {prefix_len_bits}")
    return -(prefix_len_bits + 64 + k) % (BLOCK_SIZE * 8)


def birthday_cost(k: int) -> float:
    """Expected compression calls of the full birthday step: sqrt(pi) * 2^(32 + k/2)."""
    _check_k(k)
    return math.sqrt(math.pi) * 2 ** (32 + k / 2)


def difference_form(state: IhvState, match_bits: int = 32) -> int:
    """The compared projection (a, c - d), each truncated to ``match_bits``."""
    mask = (1 << match_bits) - 1
    return ((state.a & mask) << match_bits) | (((state.c - state.d) & WORD_MASK) & mask)


def bits_for(point: int, k: int) -> BitString:
    """S_b carrying ``point`` as a (64 + k)-bit big-endian string."""
    length = 64 + k
    nbytes = (length + 7) // 8
    return BitString(length, (point << (nbytes * 8 - length)).to_bytes(nbytes, "big"))


def birthday_block(point: int) -> bytes:
    """Final block of a block-aligned prefix: zero S_r bits, then S_b."""
    return point.to_bytes(BLOCK_SIZE, "big")


class _Walk:
    def __init__(self, ctx_a: PrefixContext, ctx_b: PrefixContext, match_bits: int) -> None:
        self.states = (ctx_a.state, ctx_b.state)
        self.match_bits = match_bits
        self.calls = 0

    @staticmethod
    def side(point: int) -> int:
        return point.bit_count() & 1

    def step(self, point: int) -> int:
        self.calls += 1
        state = compress(self.states[self.side(point)], birthday_block(point))
        return difference_form(state, self.match_bits)


def birthday_search(
    ctx_a: PrefixContext,
    ctx_b: PrefixContext,
    k: int = DEFAULT_K,
    budget: int = 1 << 20,
    seed: int = 0,
    match_bits: int = 32,
    dp_bits: int | None = None,
    max_points: int = DEFAULT_MAX_POINTS,
) -> tuple[BitString, BitString] | None:
    """Distinguished-point search for birthday bit strings of both prefixes.

    Both contexts are block aligned, so S_r is ``448 - k`` zero bits and the
    whole final block is determined by S_b.

    Returns:
        ``(bits_a, bits_b)`` or ``None`` when ``budget`` compressions or
        ``max_points`` stored points run out.
    """
    _check_k(k, allow_zero=False)
    if not 1 <= match_bits <= 32:
        raise BundleParameterError(f"match_bits must be in 1..32, got {match_bits}")
    if budget <= 0:
        return None
    if ctx_a.state == ctx_b.state:
        zero = bits_for(0, k)
        return zero, zero

    space_bits = 2 * match_bits
    if dp_bits is None:
        dp_bits = max(0, space_bits // 4)
    dp_mask = (1 << dp_bits) - 1
    max_trail = MAX_TRAIL_FACTOR << dp_bits
    rng = np.random.default_rng(seed)
    walk = _Walk(ctx_a, ctx_b, match_bits)
    seen: dict[int, tuple[int, int]] = {}

    while walk.calls < budget:
        start = int(rng.integers(0, 1 << space_bits, dtype=np.uint64))
        point, length = start, 0
        while point & dp_mask and length < max_trail and walk.calls < budget:
            point = walk.step(point)
            length += 1
        if point & dp_mask:
            continue
        if point not in seen:
            if len(seen) >= max_points:
                logger.warning(f"Birthday search stopped at {max_points} stored points")
                return None
            seen[point] = (start, length)
            continue

        other_start, other_length = seen[point]
        found = _merge(walk, start, length, other_start, other_length)
        if found is None:
            continue
        x, y = found
        if walk.side(x) == walk.side(y):
            logger.debug("Birthday collision within one side, continuing")
            continue
        if walk.side(x) == 1:
            x, y = y, x
        logger.info(f"Birthday pair after {walk.calls} compressions")
        return bits_for(x, k), bits_for(y, k)

    return None


def _merge(walk: _Walk, a: int, la: int, b: int, lb: int) -> tuple[int, int] | None:
    """Walk two trails ending in the same point to the inputs where they join."""
    while la > lb:
        a, la = walk.step(a), la - 1
    while lb > la:
        b, lb = walk.step(b), lb - 1
    if a == b:
        return None
    while la > 0:
        na, nb = walk.step(a), walk.step(b)
        if na == nb:
            return a, b
        a, b, la = na, nb, la - 1
    return None


def verify_birthday_pair(
    ctx_a: PrefixContext,
    ctx_b: PrefixContext,
    bits_a: BitString,
    bits_b: BitString,
    match_bits: int = 32,
) -> bool:
    """Re-chain both final blocks and compare their difference forms."""
    point_a = int.from_bytes(bits_a.data, "big") >> (len(bits_a.data) * 8 - bits_a.length)
    point_b = int.from_bytes(bits_b.data, "big") >> (len(bits_b.data) * 8 - bits_b.length)
    state_a = compress(ctx_a.state, birthday_block(point_a))
    state_b = compress(ctx_b.state, birthday_block(point_b))
    return difference_form(state_a, match_bits) == difference_form(state_b, match_bits)
