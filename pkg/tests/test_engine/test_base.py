"""Tests for collision engine implementations."""

import pytest

from collision_kit.engine.base import CollisionEngine, KnownPairEngine, NativeEngine
from collision_kit.engine.models import PrefixContext
from collision_kit.exceptions import SearchBudgetExhausted
from collision_kit.md5 import IHV0


def test_collision_engine_is_abstract():
    with pytest.raises(TypeError):
        CollisionEngine()


def test_published_engine_serves_empty_prefix(published_engine, published_pair):
    pair = published_engine.find_ipc(PrefixContext(IHV0), seed=0)
    assert (pair.s_a, pair.s_b) == published_pair


def test_published_engine_refuses_other_states(published_engine):
    with pytest.raises(SearchBudgetExhausted, match="No stored pair"):
        published_engine.find_ipc(PrefixContext.from_prefix(bytes(64)), seed=0)


def test_known_pair_engine_checks_stored_pairs(published_pair):
    engine = KnownPairEngine()
    engine.add(IHV0, published_pair[0], published_pair[0][::-1])
    with pytest.raises(SearchBudgetExhausted, match="does not collide"):
        engine.find_ipc(PrefixContext(IHV0), seed=0)


def test_native_engine_delegates(monkeypatch, published_pair):
    calls = {}

    def fake(ctx, budget, seed, workers):
        calls.update(budget=budget, seed=seed, workers=workers)
        return "pair"

    monkeypatch.setattr("collision_kit.engine.base.find_ipc_collision", fake)
    assert NativeEngine(budget=5, workers=2).find_ipc(PrefixContext(IHV0), seed=7) == "pair"
    assert calls == {"budget": 5, "seed": 7, "workers": 2}
