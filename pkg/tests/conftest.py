"""Shared test fixtures for collision-kit."""

import pytest

from collision_kit.engine.base import KnownPairEngine
from collision_kit.engine.path import REFERENCE_PAIR_A, REFERENCE_PAIR_B


@pytest.fixture
def published_pair():
    """The 2004 two-block MD5 collision, both messages from the standard IV."""
    return REFERENCE_PAIR_A, REFERENCE_PAIR_B


@pytest.fixture
def published_engine():
    return KnownPairEngine.published()
