"""Search for one block pair that follows a differential path.

The search works in four layers, each cheaper per candidate than the last:

1. sample Q[1..16] satisfying every first-round condition and derive the
   message words by inverting the steps;
2. re-draw the free bits of Q[1] for a whole batch at once (numpy), which
   only changes m0..m4, and keep lanes whose steps 16..23 follow the path;
3. flip tunnel bits of Q[4] (changes m3, m4, m7);
4. flip every combination of tunnel bits of Q[9] (changes m8, m9, m12, first
   used at step 24) and run steps 24..63 of both messages vectorized, dropping
   lanes as soon as a Q difference leaves the path.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from collision_kit.engine.path import (
    Q_OFFSET,
    ConditionChain,
    DifferentialPath,
    message_word,
    step_forward,
)
from collision_kit.exceptions import CollisionEngineError
from collision_kit.md5.core import MESSAGE_INDEX, ROTATIONS, ROUND_CONSTANTS, compress
from collision_kit.md5.models import WORD_MASK, IhvState, MessageBlock

logger = logging.getLogger(__name__)

Q1_BATCH = 1 << 14
MAX_Q4_BITS = 4
MAX_Q9_BITS = 16


class WorkCounter:
    """Compression-equivalent budget shared by every stage of a search job."""

    def __init__(self, budget: int, stop=None) -> None:
        self.budget = budget
        self.spent = 0
        self._stop = stop

    def spend(self, n: int) -> None:
        self.spent += n

    @property
    def exhausted(self) -> bool:
        if self._stop is not None and self._stop.is_set():
            return True
        return self.spent >= self.budget


@dataclass(frozen=True)
class PathPlan:
    """A path with its condition chain and the tunnel bits reserved in it."""

    path: DifferentialPath
    chain: ConditionChain
    q4_bits: tuple[int, ...]
    q9_bits: tuple[int, ...]

    @classmethod
    def build(cls, path: DifferentialPath, ihv: IhvState) -> PathPlan:
        chain = ConditionChain(path)
        q9 = chain.add_tunnel(9, ihv)
        q4 = chain.add_tunnel(4, ihv)
        return cls(path, chain, tuple(q4), tuple(q9))


@dataclass(frozen=True)
class BlockPair:
    block_a: bytes
    block_b: bytes
    ihv_a: IhvState
    ihv_b: IhvState


def _vf(step: int, x, y, z):
    if step < 16:
        return (x & y) | (~x & z)
    if step < 32:
        return (x & z) | (y & ~z)
    if step < 48:
        return x ^ y ^ z
    return y ^ (x | ~z)


def _vrotl(x, s: int):
    return (x << np.uint32(s)) | (x >> np.uint32(32 - s))


def _vrotr(x, s: int):
    return (x >> np.uint32(s)) | (x << np.uint32(32 - s))


def _vstep(t: int, window: list, w):
    """Vectorized step t over a window [Q[t-3], Q[t-2], Q[t-1], Q[t]]."""
    tt = _vf(t, window[3], window[2], window[1]) + window[0] + np.uint32(ROUND_CONSTANTS[t]) + w
    return window[3] + _vrotl(tt, ROTATIONS[t])


def _vword(t: int, q: list):
    """Vectorized inverse of step t over a full Q list (offset indexing)."""
    return (
        _vrotr(q[t + 4] - q[t + 3], ROTATIONS[t])
        - _vf(t, q[t + 3], q[t + 2], q[t + 1])
        - q[t]
        - np.uint32(ROUND_CONSTANTS[t])
    )


def _spread(values: np.ndarray, bits: tuple[int, ...]) -> np.ndarray:
    out = np.zeros(values.shape, dtype=np.uint32)
    for j, bit in enumerate(bits):
        out |= ((values >> np.uint32(j)) & np.uint32(1)) << np.uint32(bit)
    return out


class BlockSearcher:
    """Randomized search for one block pair along ``plan.path``.

    ``successor`` is the plan of the following block, if any; a result is only
    accepted when its output chaining values can start that block.
    """

    def __init__(
        self,
        plan: PathPlan,
        ihv_a: IhvState,
        ihv_b: IhvState,
        rng: np.random.Generator,
        successor: PathPlan | None = None,
    ) -> None:
        path = plan.path
        expected = (path.q_delta[0], path.q_delta[3], path.q_delta[2], path.q_delta[1])
        if ihv_a.difference(ihv_b) != expected:
            raise CollisionEngineError("Chaining values do not carry the path's input difference")
        if not plan.chain.feasible(ihv_a):
            raise CollisionEngineError("Chaining value cannot start this differential path")
        self.plan = plan
        self.path = path
        self.ihv_a = ihv_a
        self.ihv_b = ihv_b
        self.rng = rng
        self.successor = successor
        self._md = [np.uint32(d) for d in path.message_delta]

    # Scalar layer

    def _iv(self, ihv: IhvState) -> list[int]:
        return [ihv.a, ihv.d, ihv.c, ihv.b]

    def _shifted(self, q: list[int]) -> list[int]:
        return [(v + d) & WORD_MASK for v, d in zip(q, self.path.q_delta)]

    def _second_words(self, ma: list) -> list:
        """Message-b words from message-a words that may be arrays or scalars."""
        return [
            w + d if isinstance(w, np.ndarray) else np.uint32((int(w) + int(d)) & WORD_MASK)
            for w, d in zip(ma, self._md)
        ]

    def _second_follows(self, qb: list[int], mb: list[int], steps) -> bool:
        for t in steps:
            if step_forward(t, qb, mb[MESSAGE_INDEX[t]]) != qb[t + 4]:
                return False
        return True

    def _first_round(self) -> tuple[list[int], list[int]] | None:
        q = self._iv(self.ihv_a) + self.plan.chain.sample(self.ihv_a, self.rng)
        m = [message_word(t, q) for t in range(16)]
        mb = [(w + d) & WORD_MASK for w, d in zip(m, self.path.message_delta)]
        if not self._second_follows(self._shifted(q), mb, range(16)):
            return None
        return q, m

    def sample_blocks(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Words of the draws among ``n`` that follow the path through step 15.

        Rows of the two ``(k, 16)`` uint32 arrays are the a- and b-side blocks.
        """
        qa = [np.full(n, v, dtype=np.uint32) for v in self._iv(self.ihv_a)]
        qa += self.plan.chain.sample_batch(self.ihv_a, self.rng, n)
        qb = [x + np.uint32(d) for x, d in zip(qa, self.path.q_delta)]
        ma = [_vword(t, qa) for t in range(16)]
        mb = self._second_words(ma)
        keep = np.ones(n, dtype=bool)
        for t in range(16):
            keep &= _vstep(t, qb[t : t + 4], mb[t]) == qb[t + 4]
        return np.stack(ma, axis=1)[keep], np.stack(mb, axis=1)[keep]

    # Q[1] layer

    def _vary_q1(self, q: list[int], m: list[int], counter: WorkCounter):
        n = Q1_BATCH
        counter.spend(n)
        free, ones = self.plan.chain.free_bits(1, q)
        qa = [np.full(n, v, dtype=np.uint32) for v in q]
        qa[1 + Q_OFFSET] = (
            self.rng.integers(0, 1 << 32, size=n, dtype=np.uint32) & np.uint32(free)
        ) | np.uint32(ones)
        qb = [x + np.uint32(d) for x, d in zip(qa, self.path.q_delta)]

        ma: list = [np.uint32(w) for w in m]
        keep = np.ones(n, dtype=bool)
        for t in range(5):
            ma[t] = _vword(t, qa)
            keep &= _vstep(t, qb[t : t + 4], ma[t] + self._md[t]) == qb[t + 4]
        lanes = np.nonzero(keep)[0]
        if lanes.size == 0:
            return []

        mb = self._second_words(ma)
        survivors = self._advance(16, 24, qa[16:20], qb[16:20], ma, mb, lanes)
        if survivors is None:
            return []

        bases = []
        for lane in survivors:
            q2 = list(q)
            q2[1 + Q_OFFSET] = int(qa[1 + Q_OFFSET][lane])
            m2 = list(m)
            for t in range(5):
                m2[t] = message_word(t, q2)
            base = self._extend(q2, m2, 16, 24)
            if base is not None:
                bases.append(base)
        logger.debug(f"Q1 batch: {len(bases)} of {n} lanes reach Q24")
        return bases

    def _extend(self, q: list[int], m: list[int], start: int, stop: int):
        """Scalar continuation of both messages, checking every Q difference."""
        qa = q[: start + Q_OFFSET + 1]
        qb = self._shifted(qa)
        mb = [(w + d) & WORD_MASK for w, d in zip(m, self.path.message_delta)]
        for t in range(start, stop):
            qa.append(step_forward(t, qa, m[MESSAGE_INDEX[t]]))
            qb.append(step_forward(t, qb, mb[MESSAGE_INDEX[t]]))
            if (qb[-1] - qa[-1]) & WORD_MASK != self.path.q_delta[t + 1 + Q_OFFSET]:
                return None
        return qa, m

    def _advance(self, start: int, stop: int, wa: list, wb: list, ma: list, mb: list, lanes):
        """Run steps start..stop-1 on both messages; drop lanes leaving the path."""
        wa = [x[lanes] for x in wa]
        wb = [x[lanes] for x in wb]
        ma = [w[lanes] if isinstance(w, np.ndarray) else w for w in ma]
        mb = [w[lanes] if isinstance(w, np.ndarray) else w for w in mb]
        for t in range(start, stop):
            idx = MESSAGE_INDEX[t]
            na = _vstep(t, wa, ma[idx])
            nb = _vstep(t, wb, mb[idx])
            keep = (nb - na) == np.uint32(self.path.q_delta[t + 1 + Q_OFFSET])
            wa = wa[1:] + [na]
            wb = wb[1:] + [nb]
            if not keep.all():
                if not keep.any():
                    return None
                lanes = lanes[keep]
                wa = [x[keep] for x in wa]
                wb = [x[keep] for x in wb]
                ma = [w[keep] if isinstance(w, np.ndarray) else w for w in ma]
                mb = [w[keep] if isinstance(w, np.ndarray) else w for w in mb]
        return lanes

    # Q[4] tunnel

    def _pick(self, bits: tuple[int, ...], limit: int) -> tuple[int, ...]:
        if len(bits) <= limit:
            return bits
        chosen = self.rng.choice(len(bits), size=limit, replace=False)
        return tuple(sorted(bits[i] for i in chosen))

    def _vary_q4(self, q: list[int], m: list[int]):
        bits = self._pick(self.plan.q4_bits, MAX_Q4_BITS)
        mdelta = self.path.message_delta
        for value in range(1 << len(bits)):
            flip = 0
            for j, bit in enumerate(bits):
                if (value >> j) & 1:
                    flip |= 1 << bit
            q2 = list(q)
            q2[4 + Q_OFFSET] ^= flip
            m2 = list(m)
            for t in (3, 4, 7):
                m2[t] = message_word(t, q2)
            if value:
                mb = [(w + d) & WORD_MASK for w, d in zip(m2, mdelta)]
                if not self._second_follows(self._shifted(q2[:17 + Q_OFFSET]), mb, (3, 4, 7)):
                    continue
                extended = self._extend(q2, m2, 23, 24)
                if extended is None:
                    continue
                q2 = extended[0]
            yield q2, m2

    # Q[9] tunnel

    def _q9_tunnel(self, q: list[int], m: list[int], counter: WorkCounter) -> BlockPair | None:
        bits = self._pick(self.plan.q9_bits, MAX_Q9_BITS)
        n = 1 << len(bits)
        counter.spend(n)
        flips = _spread(np.arange(n, dtype=np.uint32), bits)

        qa = [np.full(n, v, dtype=np.uint32) for v in q[: 14 + Q_OFFSET]]
        qa[9 + Q_OFFSET] = qa[9 + Q_OFFSET] ^ flips
        qb = [x + np.uint32(d) for x, d in zip(qa, self.path.q_delta)]

        ma: list = [np.uint32(w) for w in m]
        keep = np.ones(n, dtype=bool)
        for t in (8, 9, 12):
            ma[t] = _vword(t, qa)
        for t in (8, 9, 12):
            keep &= _vstep(t, qb[t : t + 4], ma[t] + self._md[t]) == qb[t + 4]
        lanes = np.nonzero(keep)[0]
        if lanes.size == 0:
            return None

        mb = self._second_words(ma)
        tail_a = [np.full(n, v, dtype=np.uint32) for v in q[21 + Q_OFFSET : 25 + Q_OFFSET]]
        tail_b = [x + np.uint32(d) for x, d in zip(tail_a, self.path.q_delta[24:28])]
        survivors = self._advance(24, 64, tail_a, tail_b, ma, mb, lanes)
        if survivors is None:
            return None

        for lane in survivors:
            q2 = list(q[: 17 + Q_OFFSET])
            q2[9 + Q_OFFSET] = int(qa[9 + Q_OFFSET][lane])
            m2 = list(m)
            for t in (8, 9, 12):
                m2[t] = message_word(t, q2)
            found = self._accept(m2)
            if found is not None:
                return found
        return None

    def _accept(self, m: list[int]) -> BlockPair | None:
        mb = [(w + d) & WORD_MASK for w, d in zip(m, self.path.message_delta)]
        block_a = MessageBlock.from_words(m)
        block_b = MessageBlock.from_words(mb)
        out_a = compress(self.ihv_a, block_a)
        out_b = compress(self.ihv_b, block_b)
        if out_a.difference(out_b) != self.path.ihv_delta:
            return None
        if self.successor is not None and not self.successor.chain.feasible(out_a):
            logger.debug("Block pair found but its output cannot start the next block")
            return None
        return BlockPair(block_a.data, block_b.data, out_a, out_b)

    def search(self, counter: WorkCounter) -> BlockPair | None:
        """Search until a block pair is found or ``counter`` runs out."""
        while not counter.exhausted:
            counter.spend(1)
            first = self._first_round()
            if first is None:
                continue
            for q, m in self._vary_q1(*first, counter):
                for q4, m4 in self._vary_q4(q, m):
                    found = self._q9_tunnel(q4, m4, counter)
                    if found is not None:
                        logger.debug(f"Block pair after {counter.spent} candidates")
                        return found
                if counter.exhausted:
                    return None
        return None
