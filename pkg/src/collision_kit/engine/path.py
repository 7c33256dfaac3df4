"""Differential paths and first-round bit conditions for two-block MD5 collisions.

A path is read off a reference collision pair: for every step, the signed bit
differences of Q_t and of the round function output. MD5's boolean functions
act on each bit position independently, so the conditions a fresh message pair
must meet to reproduce those differences reduce to small per-bit relations
between Q_t, Q_{t-1} and Q_{t-2}. ``ConditionChain`` solves those relations bit
by bit for sampling, for computing the free bits of a word and for tunnels.

Indexing: Q[-3..0] is the chaining input (a, d, c, b); Q[t+1] is produced by
step t. Lists store Q[t] at position ``t + Q_OFFSET``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from collision_kit.md5.core import (
    IHV0,
    MESSAGE_INDEX,
    ROTATIONS,
    ROUND_CONSTANTS,
    compress,
    rotl,
    rotr,
    round_function,
)
from collision_kit.md5.models import WORD_MASK, IhvState, MessageBlock

logger = logging.getLogger(__name__)

Q_OFFSET = 3
CONDITION_STEPS = 32

# The first published two-block MD5 collision (2004), from the standard IV.
REFERENCE_PAIR_A = bytes.fromhex(
    "d131dd02c5e6eec4693d9a0698aff95c2fcab58712467eab4004583eb8fb7f89"
    "55ad340609f4b30283e488832571415a085125e8f7cdc99fd91dbdf280373c5b"
    "d8823e3156348f5bae6dacd436c919c6dd53e2b487da03fd02396306d248cda0"
    "e99f33420f577ee8ce54b67080a80d1ec69821bcb6a8839396f9652b6ff72a70"
)
REFERENCE_PAIR_B = bytes.fromhex(
    "d131dd02c5e6eec4693d9a0698aff95c2fcab50712467eab4004583eb8fb7f89"
    "55ad340609f4b30283e4888325f1415a085125e8f7cdc99fd91dbd7280373c5b"
    "d8823e3156348f5bae6dacd436c919c6dd53e23487da03fd02396306d248cda0"
    "e99f33420f577ee8ce54b67080280d1ec69821bcb6a8839396f965ab6ff72a70"
)
REFERENCE_DIGEST = "79054025255fb1a26e4bc422aef54eb4"


def trace(ihv: IhvState, block: bytes) -> list[int]:
    """Q[-3..64] of a single compression."""
    m = MessageBlock(block).words()
    q = [ihv.a, ihv.d, ihv.c, ihv.b]
    for t in range(64):
        q.append(step_forward(t, q, m[MESSAGE_INDEX[t]]))
    return q


def step_forward(t: int, q: list[int], w: int) -> int:
    """Q[t+1] from Q[t-3..t] and the step's message word."""
    f = round_function(t, q[t + 3], q[t + 2], q[t + 1]) & WORD_MASK
    tt = (f + q[t] + ROUND_CONSTANTS[t] + w) & WORD_MASK
    return (q[t + 3] + rotl(tt, ROTATIONS[t])) & WORD_MASK


def message_word(t: int, q: list[int]) -> int:
    """Invert step ``t``: the message word that takes Q[t-3..t] to Q[t+1]."""
    f = round_function(t, q[t + 3], q[t + 2], q[t + 1]) & WORD_MASK
    return (
        rotr((q[t + 4] - q[t + 3]) & WORD_MASK, ROTATIONS[t]) - f - q[t] - ROUND_CONSTANTS[t]
    ) & WORD_MASK


def _bit_function(step: int, x: int, y: int, z: int) -> int:
    return round_function(step, x, y, z) & 1


def _signed_bit(plus: int, minus: int, i: int) -> int:
    if (plus >> i) & 1:
        return 1
    if (minus >> i) & 1:
        return -1
    return 0


def _bit_fits(value: int, diff: int) -> bool:
    return diff == 0 or (diff == 1 and value == 0) or (diff == -1 and value == 1)


@lru_cache(maxsize=None)
def _allowed_mask(step: int, dx: int, dy: int, dz: int, df: int) -> int:
    """Message-a bit triples (x, y, z) reproducing output difference ``df``.

    Bit ``x << 2 | y << 1 | z`` of the result is set for each allowed triple.
    """
    mask = 0
    for x in (0, 1):
        if not _bit_fits(x, dx):
            continue
        for y in (0, 1):
            if not _bit_fits(y, dy):
                continue
            for z in (0, 1):
                if not _bit_fits(z, dz):
                    continue
                out = _bit_function(step, x + dx, y + dy, z + dz) - _bit_function(step, x, y, z)
                if out == df:
                    mask |= 1 << (x << 2 | y << 1 | z)
    return mask


@dataclass(frozen=True)
class DifferentialPath:
    """Differences a reference block pair follows through one compression."""

    message_delta: tuple[int, ...]
    q_delta: tuple[int, ...]
    q_plus: tuple[int, ...]
    q_minus: tuple[int, ...]
    conditions: tuple[tuple[int, ...], ...]
    ihv_delta: tuple[int, int, int, int]

    @classmethod
    def from_pair(
        cls, ihv_a: IhvState, ihv_b: IhvState, block_a: bytes, block_b: bytes
    ) -> DifferentialPath:
        qa = trace(ihv_a, block_a)
        qb = trace(ihv_b, block_b)
        ma = MessageBlock(block_a).words()
        mb = MessageBlock(block_b).words()

        q_plus = tuple(b & ~a & WORD_MASK for a, b in zip(qa, qb))
        q_minus = tuple(a & ~b & WORD_MASK for a, b in zip(qa, qb))

        conditions = []
        for t in range(CONDITION_STEPS):
            fa = round_function(t, qa[t + 3], qa[t + 2], qa[t + 1]) & WORD_MASK
            fb = round_function(t, qb[t + 3], qb[t + 2], qb[t + 1]) & WORD_MASK
            f_plus, f_minus = fb & ~fa & WORD_MASK, fa & ~fb & WORD_MASK
            row = []
            for i in range(32):
                row.append(
                    _allowed_mask(
                        t,
                        _signed_bit(q_plus[t + 3], q_minus[t + 3], i),
                        _signed_bit(q_plus[t + 2], q_minus[t + 2], i),
                        _signed_bit(q_plus[t + 1], q_minus[t + 1], i),
                        _signed_bit(f_plus, f_minus, i),
                    )
                )
            conditions.append(tuple(row))

        out_a = compress(ihv_a, block_a)
        out_b = compress(ihv_b, block_b)
        return cls(
            message_delta=tuple((b - a) & WORD_MASK for a, b in zip(ma, mb)),
            q_delta=tuple((b - a) & WORD_MASK for a, b in zip(qa, qb)),
            q_plus=q_plus,
            q_minus=q_minus,
            conditions=tuple(conditions),
            ihv_delta=out_a.difference(out_b),
        )

    def delta(self, t: int) -> int:
        return self.q_delta[t + Q_OFFSET]

    def condition_count(self, last_step: int = 16) -> int:
        """Number of constrained bit triples over steps 0..last_step."""
        return sum(
            1 for t in range(last_step + 1) for mask in self.conditions[t] if mask != 0xFF
        )


@lru_cache(maxsize=1)
def reference_paths() -> tuple[DifferentialPath, DifferentialPath]:
    """Block-1 and block-2 paths of the published pair."""
    first = DifferentialPath.from_pair(IHV0, IHV0, REFERENCE_PAIR_A[:64], REFERENCE_PAIR_B[:64])
    mid_a = compress(IHV0, REFERENCE_PAIR_A[:64])
    mid_b = compress(IHV0, REFERENCE_PAIR_B[:64])
    second = DifferentialPath.from_pair(mid_a, mid_b, REFERENCE_PAIR_A[64:], REFERENCE_PAIR_B[64:])
    logger.debug(
        f"Reference paths: {first.condition_count()} and {second.condition_count()} "
        "first-round conditions"
    )
    return first, second


def reference_midstate() -> tuple[IhvState, IhvState]:
    """Chaining values of both messages after the first reference block."""
    return (
        compress(IHV0, REFERENCE_PAIR_A[:64]),
        compress(IHV0, REFERENCE_PAIR_B[:64]),
    )


class ConditionChain:
    """Per-bit solver for the first-round conditions of one path.

    Variables are the bits Q[-2..horizon][i]; each step t couples
    (Q[t], Q[t-1], Q[t-2]) at the same bit. Extra unary constraints (tunnel
    preconditions) can be added per word.
    """

    def __init__(self, path: DifferentialPath, horizon: int = 18) -> None:
        self.path = path
        self.horizon = horizon
        self.must_zero = {t: path.q_plus[t + Q_OFFSET] for t in range(-2, horizon + 1)}
        self.must_one = {t: path.q_minus[t + Q_OFFSET] for t in range(-2, horizon + 1)}
        self._feasible = [self._solve_bit(i) for i in range(32)]

    def _values(self, t: int, i: int) -> tuple[int, ...]:
        zero = (self.must_zero[t] >> i) & 1
        one = (self.must_one[t] >> i) & 1
        if zero and one:
            return ()
        if zero:
            return (0,)
        if one:
            return (1,)
        return (0, 1)

    def _cond(self, t: int, i: int, x: int, y: int, z: int) -> bool:
        return bool((self.path.conditions[t][i] >> (x << 2 | y << 1 | z)) & 1)

    def _solve_bit(self, i: int) -> list[int]:
        """Backward table: entry t holds the reachable (Q[t], Q[t-1]) bit pairs."""
        table = [0] * (self.horizon + 1)
        table[self.horizon] = 0b1111
        for t in range(self.horizon - 1, -1, -1):
            ok = 0
            for x in (0, 1):
                for y in (0, 1):
                    for v in self._values(t + 1, i):
                        if self._cond(t + 1, i, v, x, y) and (table[t + 1] >> (v << 1 | x)) & 1:
                            ok |= 1 << (x << 1 | y)
                            break
            table[t] = ok
        return table

    def _start_ok(self, i: int, v0: int, v1: int, v2: int) -> bool:
        return (
            v0 in self._values(0, i)
            and v1 in self._values(-1, i)
            and v2 in self._values(-2, i)
            and self._cond(0, i, v0, v1, v2)
            and bool((self._feasible[i][0] >> (v0 << 1 | v1)) & 1)
        )

    def bit_feasible(self, ihv: IhvState, i: int) -> bool:
        return self._start_ok(i, (ihv.b >> i) & 1, (ihv.c >> i) & 1, (ihv.d >> i) & 1)

    def feasible(self, ihv: IhvState) -> bool:
        """Whether a block starting from ``ihv`` can meet every first-round condition."""
        return all(self.bit_feasible(ihv, i) for i in range(32))

    def sample(self, ihv: IhvState, rng: np.random.Generator, last: int = 16) -> list[int]:
        """Random Q[1..last] meeting all conditions, given the chaining input."""
        words = [0] * (last + 1)
        coins = rng.integers(0, 2, size=(32, last + 1))
        for i in range(32):
            table = self._feasible[i]
            y, z = (ihv.b >> i) & 1, (ihv.c >> i) & 1
            for t in range(1, last + 1):
                options = [
                    v
                    for v in self._values(t, i)
                    if self._cond(t, i, v, y, z) and (table[t] >> (v << 1 | y)) & 1
                ]
                v = options[0] if len(options) == 1 else int(coins[i, t])
                words[t] |= v << i
                y, z = v, y
        return words[1:]

    def sample_batch(
        self, ihv: IhvState, rng: np.random.Generator, n: int, last: int = 16
    ) -> list[np.ndarray]:
        """:meth:`sample` for ``n`` lanes at once; one uint32 array per Q word."""
        words = [np.zeros(n, dtype=np.uint32) for _ in range(last + 1)]
        coins = rng.integers(0, 2, size=(32, last + 1, n), dtype=np.uint32)
        for i in range(32):
            table = self._feasible[i]
            y = np.full(n, (ihv.b >> i) & 1, dtype=np.uint32)
            z = np.full(n, (ihv.c >> i) & 1, dtype=np.uint32)
            for t in range(1, last + 1):
                v = np.zeros(n, dtype=np.uint32)
                for yy in (0, 1):
                    for zz in (0, 1):
                        lanes = (y == yy) & (z == zz)
                        if not lanes.any():
                            continue
                        options = [
                            x
                            for x in self._values(t, i)
                            if self._cond(t, i, x, yy, zz) and (table[t] >> (x << 1 | yy)) & 1
                        ]
                        v[lanes] = options[0] if len(options) == 1 else coins[i, t, lanes]
                words[t] |= v << np.uint32(i)
                y, z = v, y
        return words[1:]

    def free_bits(self, t: int, q: list[int]) -> tuple[int, int]:
        """(free, forced_one) masks for re-choosing Q[t] with its neighbours fixed."""
        free = ones = 0
        for i in range(32):
            bit = [(q[j + Q_OFFSET] >> i) & 1 for j in range(t - 2, t + 3)]
            allowed = []
            for v in self._values(t, i):
                if not self._cond(t, i, v, bit[1], bit[0]):
                    continue
                if not self._cond(t + 1, i, bit[3], v, bit[1]):
                    continue
                if not self._cond(t + 2, i, bit[4], bit[3], v):
                    continue
                allowed.append(v)
            if len(allowed) == 2:
                free |= 1 << i
            elif allowed == [1]:
                ones |= 1 << i
        return free, ones

    def add_tunnel(self, k: int, ihv: IhvState) -> list[int]:
        """Reserve bits of Q[k] that can flip without touching Q[k+1..] or m[k+1], m[k+2].

        Requires zero differences on Q[k-2..k+2] at the bit and forces
        Q[k+1] = 0, Q[k+2] = 1 there, so F at steps k+1 and k+2 ignores Q[k].
        Bits whose chain would become infeasible for ``ihv`` are skipped.
        """
        bits = []
        for i in range(32):
            if any(
                ((self.path.q_plus[j + Q_OFFSET] | self.path.q_minus[j + Q_OFFSET]) >> i) & 1
                for j in range(k - 2, k + 3)
            ):
                continue
            if any(self.path.conditions[s][i] != 0xFF for s in (k, k + 1, k + 2)):
                continue
            if (self.must_zero[k] >> i) & 1 or (self.must_one[k] >> i) & 1:
                continue
            saved = (self.must_zero[k + 1], self.must_one[k + 2], self._feasible[i])
            self.must_zero[k + 1] |= 1 << i
            self.must_one[k + 2] |= 1 << i
            self._feasible[i] = self._solve_bit(i)
            if self.bit_feasible(ihv, i) and not (self.must_one[k + 1] >> i) & 1 and not (
                self.must_zero[k + 2] >> i
            ) & 1:
                bits.append(i)
            else:
                self.must_zero[k + 1], self.must_one[k + 2], self._feasible[i] = saved
        logger.debug(f"Tunnel on Q{k}: {len(bits)} bits")
        return bits
