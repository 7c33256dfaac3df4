"""Multinomial naive Bayes over 16-bit tokens with add-one smoothing."""

from __future__ import annotations

import logging

import numpy as np

from collision_kit.detector.base import BaseClassifier, check_classes
from collision_kit.detector.models import KIND_BAYES, VOCAB_SIZE, LabeledSample, TrainingConfig

logger = logging.getLogger(__name__)


class TokenBayes(BaseClassifier):
    kind = KIND_BAYES

    def __init__(self, config: TrainingConfig | None = None, vocab_size: int = VOCAB_SIZE):
        super().__init__(config)
        self.vocab_size = vocab_size
        self.set_counts(np.zeros((2, vocab_size)), np.zeros(2))

    def set_counts(self, counts: np.ndarray, class_counts: np.ndarray) -> None:
        """Install token and class counts and refresh the smoothed log-probabilities."""
        self.counts = np.asarray(counts, dtype=np.float64)
        self.class_counts = np.asarray(class_counts, dtype=np.float64)
        smoothed = self.counts + 1.0
        self.log_likelihoods = np.log(smoothed) - np.log(smoothed.sum(axis=1, keepdims=True))
        with np.errstate(divide="ignore"):
            self.log_priors = np.log(self.class_counts) - np.log(max(self.class_counts.sum(), 1.0))

    def fit(self, samples: list[LabeledSample]) -> None:
        check_classes(samples)
        counts = np.zeros((2, self.vocab_size))
        class_counts = np.zeros(2)
        for sample in samples:
            np.add.at(counts[sample.label], sample.sequence.tokens.astype(np.int64), 1.0)
            class_counts[sample.label] += 1
        self.set_counts(counts, class_counts)
        logger.info(
            f"Bayes trained on {len(samples)} samples "
            f"({int(class_counts[1])} positive, {int(class_counts[0])} negative)"
        )

    def class_distributions(self) -> np.ndarray:
        """Class-conditional token distributions, one row per class."""
        return np.exp(self.log_likelihoods)

    def posterior(self, tokens: np.ndarray) -> np.ndarray:
        """Normalized ``[P(negative), P(positive)]``."""
        joint = self.log_priors + self.log_likelihoods[:, tokens.astype(np.int64)].sum(axis=1)
        return np.exp(joint - np.logaddexp(joint[0], joint[1]))

    def score(self, tokens: np.ndarray) -> float:
        return float(self.posterior(tokens)[1])
