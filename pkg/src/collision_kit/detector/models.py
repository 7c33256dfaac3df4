"""Data models for collision detection."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

VOCAB_SIZE = 1 << 16
WINDOW_BYTES = 256
WINDOW_TOKENS = WINDOW_BYTES // 2
JS_WINDOW_TOKENS = 64

POSITIVE = 1
NEGATIVE = 0

KIND_BAYES = "bayes"
KIND_NEURAL = "neural"
KINDS = (KIND_BAYES, KIND_NEURAL)


@dataclass(eq=False)
class TokenSequence:
    """16-bit tokens read from ``offset`` in their source file."""

    tokens: np.ndarray
    offset: int = 0

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(eq=False)
class LabeledSample:
    sequence: TokenSequence
    label: int


@dataclass(frozen=True)
class TrainingConfig:
    """Hyperparameters; the neural fields are ignored by the Bayes classifier."""

    epochs: int = 5
    learning_rate: float = 0.5
    batch_size: int = 16
    embed_dim: int = 32
    hidden_dim: int = 64
    seed: int = 0


@dataclass(frozen=True)
class Candidate:
    """A JS window that passed the similarity prefilter."""

    offset: int
    length: int
    js: float
    score: float
    label: int


@dataclass
class DetectionReport:
    windows_total: int
    candidates: list[Candidate] = field(default_factory=list)
    flagged: list[tuple[int, int]] = field(default_factory=list)
    js_evaluations: int = 0
    tau: float = 0.0
    diagnostic: str = ""

    @property
    def candidate_count(self) -> int:
        return len(self.candidates)

    @property
    def flagged_count(self) -> int:
        return sum(1 for c in self.candidates if c.label == POSITIVE)


@dataclass(frozen=True)
class EvaluationRow:
    """Window-level scores of one scanning mode."""

    mode: str
    samples: int
    precision: float
    recall: float
    f1: float
    true_positives: int = 0
    false_positives: int = 0
    false_negatives: int = 0
