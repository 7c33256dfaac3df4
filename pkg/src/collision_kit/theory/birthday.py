"""Birthday-problem probabilities for token windows, closed form and simulated.

The token vocabulary plays the part of the calendar and the window length the
number of people. Clean content draws from a small vocabulary and repeats
itself; collision bytes draw from nearly all 2^16 tokens and rarely do.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from collision_kit.exceptions import ParameterRegimeError
from collision_kit.theory.models import (
    BirthdayParams,
    DiscrepancyResult,
    MixedProbability,
    TheoryResult,
)

logger = logging.getLogger(__name__)

# Cells per Monte-Carlo batch.
BATCH_CELLS = 1 << 22

REGIME_RATIO = 10
ORDER_GAP = 0.5
CLOSE_TOLERANCE = 0.05

# Factors summed per numpy call in the product form.
_LOG_CHUNK = 1 << 20


def p_exact(n: int, s: int) -> float:
    """Probability that ``n`` uniform draws from ``s`` values contain a repeat."""
    if n <= 1:
        return 0.0
    if n > s:
        return 1.0
    log_none = 0.0
    for start in range(1, n, _LOG_CHUNK):
        i = np.arange(start, min(n, start + _LOG_CHUNK), dtype=np.float64)
        log_none += float(np.sum(np.log1p(-i / s)))
    return float(-math.expm1(log_none))


def p_approx(n: int, s: int) -> float:
    """``1 - exp(-n^2 / 2s)``."""
    return min(1.0, max(0.0, -math.expm1(-(n * n) / (2 * s))))


def _exp_term(p: float, n: int, s: int) -> float:
    return math.exp(-(p * p * n * n) / (2 * s))


def p_clean(params: BirthdayParams) -> float:
    """Repeat probability among the clean share of a window."""
    return 1.0 - _exp_term(params.p_a, params.n, params.s_a)


def p_collision(params: BirthdayParams) -> float:
    """Repeat probability among the collision share of a window."""
    return 1.0 - _exp_term(params.p_b, params.n, params.s_b)


def p_mixed(params: BirthdayParams) -> MixedProbability:
    """The clean/collision cross-pair formula, evaluated term for term.

    ``1 - e^(-n^2/2s) + e^(-p_a^2 n^2/2s_a) + e^(-p_b^2 n^2/2s_b)`` adds
    probabilities of overlapping events and leaves [0, 1] in degenerate
    regimes. The value is clamped and ``clamped`` reports when that happened.
    """
    raw = (
        1.0
        - _exp_term(1.0, params.n, params.s)
        + _exp_term(params.p_a, params.n, params.s_a)
        + _exp_term(params.p_b, params.n, params.s_b)
    )
    result = MixedProbability(min(1.0, max(0.0, raw)), raw)
    if result.clamped:
        logger.warning(f"Mixed-pair formula gave {raw:.6f} for {params}, clamped to {result.value}")
    return result


def p_cross(params: BirthdayParams) -> float:
    """Probability that some collision token equals some clean token in one window.

    The clean share covers ``s_a(1 - (1 - 1/s_a)^n_a)`` distinct values on
    average; each of the ``n_b`` collision tokens lands on one of them with
    probability ``distinct / s_b``.
    """
    n_a, n_b = params.clean_tokens, params.collision_tokens
    if not n_a or not n_b:
        return 0.0
    distinct = 1.0
    if params.s_a > 1:
        distinct = params.s_a * -math.expm1(n_a * math.log1p(-1.0 / params.s_a))
    if distinct >= params.s_b:
        return 1.0
    return float(-math.expm1(n_b * math.log1p(-distinct / params.s_b)))


def _has_repeat(draws: np.ndarray) -> np.ndarray:
    ordered = np.sort(draws, axis=1)
    return np.any(ordered[:, 1:] == ordered[:, :-1], axis=1)


def _count_repeats(n: int, s: int, trials: int, rng: np.random.Generator) -> int:
    if n <= 1:
        return 0
    rows = max(1, BATCH_CELLS // n)
    hits = 0
    for start in range(0, trials, rows):
        draws = rng.integers(0, s, size=(min(rows, trials - start), n))
        hits += int(_has_repeat(draws).sum())
    return hits


def _partition(trials: int, workers: int) -> list[int]:
    base, extra = divmod(trials, workers)
    return [base + (1 if i < extra else 0) for i in range(workers)]


def _run_partitioned(task, trials: int, seed: int, workers: int) -> list:
    """``task(share, rng)`` per worker share, with seeds spawned from ``seed``."""
    workers = max(1, min(workers, trials))
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(workers)]
    shares = _partition(trials, workers)
    if workers == 1:
        return [task(shares[0], rngs[0])]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, shares, rngs))


def monte_carlo(n: int, s: int, trials: int, seed: int = 0, workers: int = 1) -> TheoryResult:
    """Fraction of ``trials`` in which ``n`` uniform draws from ``s`` values repeat.

    Results depend on ``seed`` and ``workers`` only.
    """
    if trials < 1:
        raise ParameterRegimeError(f"Need at least one trial, got {trials}")
    hits = sum(
        _run_partitioned(lambda share, rng: _count_repeats(n, s, share, rng), trials, seed, workers)
    )
    result = TheoryResult(p_exact(n, s), hits / trials, trials)
    logger.info(
        f"Birthday n={n} s={s}: simulated {result.estimate:.4f} ± {result.standard_error:.4f}, "
        f"exact {result.probability:.4f}"
    )
    return result


def in_regime(params: BirthdayParams, ratio: float = REGIME_RATIO) -> bool:
    """Whether the clean vocabulary and share clearly dominate as the ordering requires."""
    return (
        params.s_a * ratio <= params.s_b < params.s
        and params.p_a >= ratio * params.p_b
    )


def _simulate_window(
    params: BirthdayParams, trials: int, rng: np.random.Generator
) -> tuple[int, int, int]:
    """Counts of windows with a clean repeat, a collision repeat and a clean/collision match.

    Clean tokens take values in ``[0, s_a)``; collision tokens in ``[0, s_b)``,
    which contains the clean range.
    """
    n_a, n_b = params.clean_tokens, params.collision_tokens
    clean = collision = mixed = 0
    rows = max(1, BATCH_CELLS // max(params.n, n_a * n_b))
    for start in range(0, trials, rows):
        batch = min(rows, trials - start)
        a = rng.integers(0, params.s_a, size=(batch, n_a))
        b = rng.integers(0, params.s_b, size=(batch, n_b))
        if n_a > 1:
            clean += int(_has_repeat(a).sum())
        if n_b > 1:
            collision += int(_has_repeat(b).sum())
        if n_a and n_b:
            mixed += int(np.any(a[:, :, None] == b[:, None, :], axis=(1, 2)).sum())
    return clean, collision, mixed


def discrepancy_experiment(
    params: BirthdayParams,
    window_tokens: int | None = None,
    trials: int = 10_000,
    seed: int = 0,
    workers: int = 1,
) -> DiscrepancyResult:
    """Simulate mixed windows and compare the three repeat probabilities.

    Inside the regime (clean vocabulary and share both dominating by
    ``REGIME_RATIO``) the result records whether the clean probability clearly
    exceeds the other two and those two are close. Outside it the numbers are
    reported and ``ordering_holds`` stays ``None``.

    Raises:
        ParameterRegimeError: ``trials`` is below one.
    """
    if trials < 1:
        raise ParameterRegimeError(f"Need at least one trial, got {trials}")
    if window_tokens is not None and window_tokens != params.n:
        params = BirthdayParams(
            window_tokens, params.s, params.s_a, params.s_b, params.p_a, params.p_b
        )

    parts = _run_partitioned(
        lambda share, rng: _simulate_window(params, share, rng), trials, seed, workers
    )
    counts = [sum(column) for column in zip(*parts)]
    mixed_formula = p_mixed(params)
    clean = TheoryResult(p_clean(params), counts[0] / trials, trials)
    collision = TheoryResult(p_collision(params), counts[1] / trials, trials)
    mixed = TheoryResult(mixed_formula.value, counts[2] / trials, trials)

    regime = in_regime(params)
    ordering = None
    if regime:
        ordering = (
            clean.estimate - max(collision.estimate, mixed.estimate) >= ORDER_GAP
            and abs(collision.estimate - mixed.estimate) <= CLOSE_TOLERANCE
        )
        if not ordering:
            logger.warning(
                f"Ordering not observed for {params}: clean {clean.estimate:.4f}, "
                f"collision {collision.estimate:.4f}, mixed {mixed.estimate:.4f}"
            )
    pairwise = p_cross(params)
    logger.info(
        f"Discrepancy n={params.n}: clean {clean.estimate:.4f}, collision "
        f"{collision.estimate:.4f}, mixed {mixed.estimate:.4f} (pairwise {pairwise:.4f}, "
        f"formula {mixed_formula.raw:.4f})"
    )
    return DiscrepancyResult(
        params, clean, collision, mixed, mixed_formula, regime, ordering, pairwise
    )
