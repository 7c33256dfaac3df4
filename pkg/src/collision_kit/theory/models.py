"""Data models for the birthday-problem calculations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from collision_kit.exceptions import ParameterRegimeError

PROPORTION_TOLERANCE = 1e-12


@dataclass(frozen=True)
class BirthdayParams:
    """A window of ``n`` tokens mixing clean and collision material.

    Clean tokens are drawn from the first ``s_a`` values of the vocabulary and
    make up ``p_a`` of the window; collision tokens are drawn from the first
    ``s_b`` values, so every clean value is also a possible collision value.
    """

    n: int
    s: int
    s_a: int
    s_b: int
    p_a: float
    p_b: float

    def __post_init__(self):
        if min(self.n, self.s, self.s_a, self.s_b) < 1:
            raise ParameterRegimeError(
                f"Sizes must be positive: n={self.n} s={self.s} s_a={self.s_a} s_b={self.s_b}"
            )
        if not self.s_a <= self.s_b <= self.s:
            raise ParameterRegimeError(
                f"Need s_a <= s_b <= s, got s_a={self.s_a} s_b={self.s_b} s={self.s}"
            )
        if self.p_a < 0 or self.p_b < 0 or abs(self.p_a + self.p_b - 1.0) > PROPORTION_TOLERANCE:
            raise ParameterRegimeError(
                f"Proportions must be non-negative and sum to 1: p_a={self.p_a} p_b={self.p_b}"
            )

    @property
    def p_s_b(self) -> float:
        """Share of the full vocabulary taken by collision tokens."""
        return self.s_b / self.s

    @property
    def clean_tokens(self) -> int:
        return round(self.p_a * self.n)

    @property
    def collision_tokens(self) -> int:
        return self.n - self.clean_tokens


@dataclass(frozen=True)
class TheoryResult:
    """A closed-form probability next to its Monte-Carlo estimate."""

    probability: float
    estimate: float
    trials: int

    @property
    def standard_error(self) -> float:
        return math.sqrt(self.estimate * (1.0 - self.estimate) / self.trials)

    @property
    def discrepancy(self) -> float:
        return self.estimate - self.probability


@dataclass(frozen=True)
class MixedProbability:
    """The mixed-pair formula before and after clamping into [0, 1]."""

    value: float
    raw: float

    @property
    def clamped(self) -> bool:
        return self.value != self.raw


@dataclass(frozen=True)
class DiscrepancyResult:
    params: BirthdayParams
    clean: TheoryResult
    collision: TheoryResult
    mixed: TheoryResult
    mixed_formula: MixedProbability
    in_regime: bool
    ordering_holds: bool | None = None
    mixed_pairwise: float | None = None


@dataclass
class ConvergenceCurves:
    """Running means of pairwise window similarity, one entry per sampled pair."""

    clean_clean: np.ndarray
    collision_collision: np.ndarray
    clean_collision: np.ndarray
    window_tokens: int = 64
    seed: int = 0
    labels: tuple[str, ...] = field(
        default=("clean-clean", "collision-collision", "clean-collision")
    )

    @property
    def samples(self) -> int:
        return len(self.clean_clean)

    def final_means(self) -> tuple[float, float, float]:
        return (
            float(self.clean_clean[-1]),
            float(self.collision_collision[-1]),
            float(self.clean_collision[-1]),
        )

    def final_quartile_variation(self) -> tuple[float, float, float]:
        """(max - min) / last value of each curve over its final quarter."""
        start = self.samples * 3 // 4
        out = []
        for curve in (self.clean_clean, self.collision_collision, self.clean_collision):
            tail = curve[start:]
            last = float(tail[-1])
            out.append(float(tail.max() - tail.min()) / last if last else 0.0)
        return tuple(out)
