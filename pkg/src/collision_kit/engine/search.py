"""Identical-prefix collision search: two block pairs along the reference paths.

Work is cut into jobs of ``JOB_BUDGET`` candidates. Job ``j`` draws from a seed
derived from ``(seed, j)`` and the winning pair is the one of the lowest
successful job, so the result does not depend on the number of workers.
"""

from __future__ import annotations

import logging
import multiprocessing
import os
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass

import numpy as np

from collision_kit.engine.block import BlockSearcher, PathPlan, WorkCounter
from collision_kit.engine.models import IPC_SUFFIX_LEN, IpcSuffixPair, PrefixContext
from collision_kit.engine.path import reference_midstate, reference_paths
from collision_kit.exceptions import (
    CollisionEngineError,
    CollisionVerificationError,
    SearchBudgetExhausted,
)
from collision_kit.md5.core import IHV0, chain
from collision_kit.md5.models import IhvState

logger = logging.getLogger(__name__)

DEFAULT_WORKERS = int(os.environ.get("COLLISION_KIT_WORKERS", os.cpu_count() or 1))
DEFAULT_BUDGET = int(os.environ.get("COLLISION_KIT_BUDGET", 1 << 40))
JOB_BUDGET = 1 << 28

_STOP = None


@dataclass(frozen=True)
class JobOutcome:
    index: int
    examined: int
    s_a: bytes | None = None
    s_b: bytes | None = None


def _init_worker(stop) -> None:
    global _STOP
    _STOP = stop


def _job_slices(budget: int):
    index = 0
    remaining = budget
    while remaining > 0:
        size = min(JOB_BUDGET, remaining)
        yield index, size
        remaining -= size
        index += 1


def job_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def run_job(state: tuple[int, int, int, int], seed: int, index: int, budget: int) -> JobOutcome:
    """One seeded attempt at both blocks within ``budget`` candidates."""
    ihv = IhvState(*state)
    rng = job_rng(seed, index)
    counter = WorkCounter(budget, _STOP)
    first_path, second_path = reference_paths()
    second_plan = PathPlan.build(second_path, reference_midstate()[0])

    first = BlockSearcher(PathPlan.build(first_path, ihv), ihv, ihv, rng, successor=second_plan)
    block1 = first.search(counter)
    if block1 is None:
        return JobOutcome(index, counter.spent)
    logger.debug(f"Job {index}: first block after {counter.spent} candidates")

    second = BlockSearcher(second_plan, block1.ihv_a, block1.ihv_b, rng)
    block2 = second.search(counter)
    if block2 is None:
        return JobOutcome(index, counter.spent)
    return JobOutcome(
        index,
        counter.spent,
        block1.block_a + block2.block_a,
        block1.block_b + block2.block_b,
    )


def _accept(ctx: PrefixContext, outcome: JobOutcome, examined: int) -> IpcSuffixPair:
    s_a, s_b = outcome.s_a, outcome.s_b
    if (
        len(s_a) != IPC_SUFFIX_LEN
        or len(s_b) != IPC_SUFFIX_LEN
        or s_a == s_b
        or chain(ctx.state, s_a) != chain(ctx.state, s_b)
    ):
        raise CollisionVerificationError(f"Job {outcome.index} returned a pair that does not collide")
    logger.info(f"IPC collision found by job {outcome.index} after {examined} candidates")
    return IpcSuffixPair(s_a, s_b, found_after=examined)


def find_ipc_collision(
    ctx: PrefixContext,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    workers: int | None = None,
) -> IpcSuffixPair:
    """Find (S, S') with chain(ctx.state, S) == chain(ctx.state, S').

    Args:
        ctx: Block-aligned prefix context.
        budget: Work limit in compression-equivalent candidates.
        seed: Search seed; equal seeds give equal pairs.
        workers: Worker processes (default ``COLLISION_KIT_WORKERS`` or CPU count).

    Raises:
        SearchBudgetExhausted: No collision within ``budget``.
    """
    workers = workers or DEFAULT_WORKERS
    state = ctx.state.words()
    slices = list(_job_slices(budget))
    logger.info(f"IPC search: {len(slices)} jobs, {workers} workers, seed {seed}")

    if workers <= 1:
        examined = 0
        for index, size in slices:
            outcome = run_job(state, seed, index, size)
            examined += outcome.examined
            if outcome.s_a is not None:
                return _accept(ctx, outcome, examined)
        raise SearchBudgetExhausted(f"No collision within {budget} candidates (seed {seed})")

    mp = multiprocessing.get_context("spawn")
    stop = mp.Event()
    outcomes: dict[int, JobOutcome] = {}
    examined = 0
    resolved = 0
    submitted = 0
    with ProcessPoolExecutor(
        max_workers=workers, mp_context=mp, initializer=_init_worker, initargs=(stop,)
    ) as pool:
        pending = {}
        while resolved < len(slices):
            while submitted < len(slices) and len(pending) < workers:
                index, size = slices[submitted]
                pending[pool.submit(run_job, state, seed, index, size)] = index
                submitted += 1
            done, _ = wait(pending, return_when=FIRST_COMPLETED)
            for future in done:
                index = pending.pop(future)
                try:
                    outcomes[index] = future.result()
                except Exception as e:
                    logger.warning(f"Search job {index} failed: {e}")
                    stop.set()
                    raise CollisionEngineError(f"Search worker failed: {e}") from e
            while resolved in outcomes:
                outcome = outcomes.pop(resolved)
                resolved += 1
                examined += outcome.examined
                if outcome.s_a is not None:
                    stop.set()
                    for future in pending:
                        future.cancel()
                    return _accept(ctx, outcome, examined)
    raise SearchBudgetExhausted(f"No collision within {budget} candidates (seed {seed})")


SAMPLE_BATCH = 1 << 12
MAX_SAMPLE_BATCHES = 256


def _path_blocks(searcher: BlockSearcher, count: int) -> tuple[np.ndarray, np.ndarray]:
    rows_a, rows_b, have = [], [], 0
    for _ in range(MAX_SAMPLE_BATCHES):
        a, b = searcher.sample_blocks(SAMPLE_BATCH)
        rows_a.append(a)
        rows_b.append(b)
        have += len(a)
        if have >= count:
            return np.concatenate(rows_a)[:count], np.concatenate(rows_b)[:count]
    raise CollisionEngineError(
        f"Only {have} of {count} blocks followed the path in {MAX_SAMPLE_BATCHES} batches"
    )


def path_suffix_pairs(count: int, seed: int = 0) -> list[tuple[bytes, bytes]]:
    """``count`` two-block message pairs built the way :func:`run_job` builds suffixes.

    Block one follows the first reference path from the standard IV and block
    two the second path from the reference midstate, both through the first
    round. Steps 16..63 are not required to line up, so the pairs are not
    collisions; they carry the byte structure of found suffixes at the cost of
    sampling alone.
    """
    if count < 1:
        return []
    first_path, second_path = reference_paths()
    mid_a, mid_b = reference_midstate()
    rng = np.random.default_rng(seed)
    first = BlockSearcher(PathPlan.build(first_path, IHV0), IHV0, IHV0, rng)
    second = BlockSearcher(PathPlan.build(second_path, mid_a), mid_a, mid_b, rng)
    a1, b1 = _path_blocks(first, count)
    a2, b2 = _path_blocks(second, count)
    side_a = np.concatenate([a1, a2], axis=1).astype("<u4")
    side_b = np.concatenate([b1, b2], axis=1).astype("<u4")
    pairs = [(row_a.tobytes(), row_b.tobytes()) for row_a, row_b in zip(side_a, side_b)]
    logger.info(f"Sampled {count} path-following suffix pairs (seed {seed})")
    return pairs
