"""Training entry points and the cross-corpus accuracy matrix."""

from __future__ import annotations

import logging

import numpy as np

from collision_kit.detector.base import BaseClassifier
from collision_kit.detector.bayes import TokenBayes
from collision_kit.detector.models import (
    KIND_BAYES,
    KIND_NEURAL,
    KINDS,
    LabeledSample,
    TokenSequence,
    TrainingConfig,
)
from collision_kit.detector.neural import SequenceNet
from collision_kit.exceptions import DetectorError

logger = logging.getLogger(__name__)


def make_classifier(kind: str, config: TrainingConfig | None = None) -> BaseClassifier:
    if kind == KIND_BAYES:
        return TokenBayes(config)
    if kind == KIND_NEURAL:
        return SequenceNet(config)
    raise DetectorError(f"Unknown classifier kind {kind!r}, expected one of {KINDS}")


def train(
    kind: str, samples: list[LabeledSample], config: TrainingConfig | None = None
) -> BaseClassifier:
    """Fit a fresh classifier of ``kind``.

    Raises:
        TrainingDataError: Empty or single-class samples.
        SequenceLengthError: Neural samples of the wrong window length.
    """
    model = make_classifier(kind, config)
    model.fit(samples)
    return model


def predict(model: BaseClassifier, sequence: TokenSequence | np.ndarray) -> tuple[int, float]:
    return model.predict(sequence)


def transfer_matrix(
    corpora: dict[str, tuple[list[LabeledSample], list[LabeledSample]]],
    kinds: tuple[str, ...] = KINDS,
    config: TrainingConfig | None = None,
) -> dict[tuple[str, str], dict[str, float]]:
    """Accuracy of a model trained on each corpus, tested on every corpus.

    Args:
        corpora: ``name -> (train samples, test samples)``.

    Returns:
        ``(kind, train corpus) -> {test corpus: accuracy}``.
    """
    matrix: dict[tuple[str, str], dict[str, float]] = {}
    for kind in kinds:
        for train_name, (train_samples, _) in corpora.items():
            model = train(kind, train_samples, config)
            matrix[(kind, train_name)] = {
                test_name: model.accuracy(test_samples)
                for test_name, (_, test_samples) in corpora.items()
            }
            logger.info(f"{kind} trained on {train_name}: {matrix[(kind, train_name)]}")
    return matrix


def format_matrix(matrix: dict[tuple[str, str], dict[str, float]]) -> str:
    """Tab-separated accuracy table, one row per (kind, training corpus)."""
    tests = sorted({name for row in matrix.values() for name in row})
    lines = ["# kind\ttrain\t" + "\t".join(tests)]
    for (kind, train_name), row in matrix.items():
        lines.append(f"{kind}\t{train_name}\t" + "\t".join(f"{row[t]:.4f}" for t in tests))
    return "\n".join(lines) + "\n"
