"""Pluggable sources of identical-prefix collision suffixes."""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod

from collision_kit.engine.models import IpcSuffixPair, PrefixContext
from collision_kit.engine.path import REFERENCE_PAIR_A, REFERENCE_PAIR_B
from collision_kit.engine.search import DEFAULT_BUDGET, find_ipc_collision
from collision_kit.exceptions import SearchBudgetExhausted
from collision_kit.md5.core import IHV0, chain
from collision_kit.md5.models import IhvState

logger = logging.getLogger(__name__)


class CollisionEngine(ABC):
    """Abstract interface for producing IPC suffix pairs."""

    @abstractmethod
    def find_ipc(self, ctx: PrefixContext, seed: int) -> IpcSuffixPair:
        """Return a verified pair colliding after ``ctx``."""
        ...


class NativeEngine(CollisionEngine):
    """The built-in two-block search."""

    def __init__(self, budget: int = DEFAULT_BUDGET, workers: int | None = None):
        self.budget = budget
        self.workers = workers

    def find_ipc(self, ctx: PrefixContext, seed: int) -> IpcSuffixPair:
        return find_ipc_collision(ctx, budget=self.budget, seed=seed, workers=self.workers)


class KnownPairEngine(CollisionEngine):
    """Serves previously found pairs keyed by the chaining value they collide after."""

    def __init__(self, pairs: dict[IhvState, tuple[bytes, bytes]] | None = None):
        self.pairs = dict(pairs or {})

    @classmethod
    def published(cls) -> KnownPairEngine:
        """Engine holding the 2004 pair, usable only after an empty prefix."""
        return cls({IHV0: (REFERENCE_PAIR_A, REFERENCE_PAIR_B)})

    def add(self, state: IhvState, s_a: bytes, s_b: bytes) -> None:
        self.pairs[state] = (s_a, s_b)

    def find_ipc(self, ctx: PrefixContext, seed: int) -> IpcSuffixPair:
        if ctx.state not in self.pairs:
            raise SearchBudgetExhausted(f"No stored pair for chaining value {ctx.state}")
        s_a, s_b = self.pairs[ctx.state]
        if chain(ctx.state, s_a) != chain(ctx.state, s_b):
            raise SearchBudgetExhausted("Stored pair does not collide for this chaining value")
        logger.debug(f"Using stored pair for {ctx.state}")
        return IpcSuffixPair(s_a, s_b, found_after=0)
