"""Abstract base class for window classifiers."""

from __future__ import annotations

from abc import ABC, abstractmethod

import numpy as np

from collision_kit.detector.models import (
    NEGATIVE,
    POSITIVE,
    LabeledSample,
    TokenSequence,
    TrainingConfig,
)
from collision_kit.exceptions import TrainingDataError


class BaseClassifier(ABC):
    """Scores token windows by the probability that they hold collision bytes."""

    kind: str

    def __init__(self, config: TrainingConfig | None = None):
        self.config = config or TrainingConfig()
        self.losses: list[float] = []

    @abstractmethod
    def fit(self, samples: list[LabeledSample]) -> None:
        """Train on labeled windows."""
        ...

    @abstractmethod
    def score(self, tokens: np.ndarray) -> float:
        """Positive-class probability of one window."""
        ...

    def predict(self, sequence: TokenSequence | np.ndarray) -> tuple[int, float]:
        tokens = sequence.tokens if isinstance(sequence, TokenSequence) else sequence
        score = self.score(tokens)
        return (POSITIVE if score >= 0.5 else NEGATIVE), score

    def accuracy(self, samples: list[LabeledSample]) -> float:
        if not samples:
            return 0.0
        hits = sum(self.predict(s.sequence)[0] == s.label for s in samples)
        return hits / len(samples)


def check_classes(samples: list[LabeledSample]) -> None:
    if not samples:
        raise TrainingDataError("No training samples")
    labels = {s.label for s in samples}
    if labels != {NEGATIVE, POSITIVE}:
        raise TrainingDataError(f"Training needs both classes, got labels {sorted(labels)}")
