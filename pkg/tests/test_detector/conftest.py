"""Toy corpora for the detector tests."""

from functools import lru_cache

import pytest

from collision_kit.detector.dataset import make_training_set
from collision_kit.detector.train import train
from collision_kit.engine.search import path_suffix_pairs
from collision_kit.stealth.weights import make_toy_weights

SUFFIX_SIZE = 128


@lru_cache(maxsize=None)
def _suffixes(count: int, seed: int) -> tuple[bytes, ...]:
    return tuple(a for a, _ in path_suffix_pairs(count, seed))


def collision_like(count: int, seed: int, size: int = SUFFIX_SIZE) -> list[bytes]:
    """Engine-sampled suffix bytes; longer regions join consecutive suffixes."""
    per = -(-size // SUFFIX_SIZE)
    material = _suffixes(count * per, seed)
    return [b"".join(material[i * per : (i + 1) * per])[:size] for i in range(count)]


@pytest.fixture
def make_noise():
    return collision_like


@pytest.fixture(scope="session")
def source_weights():
    return make_toy_weights([400_000], seed=0)


@pytest.fixture(scope="session")
def training_set(source_weights):
    # Enough positives that most of the 2^16 tokens occur several times in collision halves.
    return make_training_set(source_weights, collision_like(3000, seed=1), seed=0, count=3000)


@pytest.fixture(scope="session")
def small_training_set():
    return make_training_set(
        make_toy_weights([40_000], seed=2), collision_like(40, seed=3), seed=0, count=200
    )


@pytest.fixture(scope="session")
def bayes_model(training_set):
    return train("bayes", training_set)
