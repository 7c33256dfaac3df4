"""Recurrent window classifier: token embedding, tanh recurrence, mean pooling, sigmoid.

Trained by mini-batch gradient descent on binary cross-entropy with
backpropagation through time.
"""

from __future__ import annotations

import logging

import numpy as np

from collision_kit.detector.base import BaseClassifier, check_classes
from collision_kit.detector.models import (
    KIND_NEURAL,
    VOCAB_SIZE,
    WINDOW_TOKENS,
    LabeledSample,
    TrainingConfig,
)
from collision_kit.exceptions import SequenceLengthError

logger = logging.getLogger(__name__)

PARAM_NAMES = ("embedding", "w_in", "w_rec", "b_rec", "w_out", "b_out")


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * z))


class SequenceNet(BaseClassifier):
    kind = KIND_NEURAL

    def __init__(
        self,
        config: TrainingConfig | None = None,
        vocab_size: int = VOCAB_SIZE,
        window_tokens: int = WINDOW_TOKENS,
    ):
        super().__init__(config)
        self.vocab_size = vocab_size
        self.window_tokens = window_tokens
        d, h = self.config.embed_dim, self.config.hidden_dim
        rng = np.random.default_rng(self.config.seed)
        # Tokens never seen in training keep a zero embedding.
        self.params: dict[str, np.ndarray] = {
            "embedding": np.zeros((vocab_size, d)),
            "w_in": rng.normal(0.0, 1.0 / np.sqrt(d), (d, h)),
            "w_rec": rng.normal(0.0, 0.5 / np.sqrt(h), (h, h)),
            "b_rec": np.zeros(h),
            "w_out": rng.normal(0.0, 1.0 / np.sqrt(h), h),
            "b_out": np.zeros(1),
        }

    @property
    def parameter_count(self) -> int:
        return sum(p.size for p in self.params.values())

    def _check_length(self, tokens: np.ndarray) -> None:
        if tokens.shape[-1] != self.window_tokens:
            raise SequenceLengthError(
                f"Window has {tokens.shape[-1]} tokens, model expects {self.window_tokens}"
            )

    def forward(self, tokens: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
        """Positive probabilities for a ``(batch, steps)`` token array, plus hidden states."""
        p = self.params
        batch, steps = tokens.shape
        x = p["embedding"][tokens]
        states = [np.zeros((batch, p["w_rec"].shape[0]))]
        for t in range(steps):
            states.append(np.tanh(x[:, t] @ p["w_in"] + states[-1] @ p["w_rec"] + p["b_rec"]))
        pooled = np.mean(states[1:], axis=0)
        return _sigmoid(pooled @ p["w_out"] + p["b_out"][0]), states

    def loss(self, tokens: np.ndarray, labels: np.ndarray) -> float:
        probs, _ = self.forward(tokens)
        probs = np.clip(probs, 1e-12, 1 - 1e-12)
        return float(-np.mean(labels * np.log(probs) + (1 - labels) * np.log(1 - probs)))

    def loss_and_gradients(
        self, tokens: np.ndarray, labels: np.ndarray
    ) -> tuple[float, dict[str, np.ndarray]]:
        p = self.params
        batch, steps = tokens.shape
        probs, states = self.forward(tokens)
        clipped = np.clip(probs, 1e-12, 1 - 1e-12)
        loss = float(-np.mean(labels * np.log(clipped) + (1 - labels) * np.log(1 - clipped)))

        grads = {name: np.zeros_like(value) for name, value in p.items()}
        dz = (probs - labels) / batch
        pooled = np.mean(states[1:], axis=0)
        grads["w_out"] = pooled.T @ dz
        grads["b_out"] = np.array([dz.sum()])
        d_pool = np.outer(dz, p["w_out"]) / steps

        x = p["embedding"][tokens]
        d_next = np.zeros_like(states[0])
        for t in range(steps - 1, -1, -1):
            h = states[t + 1]
            da = (d_pool + d_next) * (1.0 - h * h)
            grads["w_in"] += x[:, t].T @ da
            grads["w_rec"] += states[t].T @ da
            grads["b_rec"] += da.sum(axis=0)
            np.add.at(grads["embedding"], tokens[:, t], da @ p["w_in"].T)
            d_next = da @ p["w_rec"].T
        return loss, grads

    def fit(self, samples: list[LabeledSample]) -> None:
        check_classes(samples)
        tokens = np.stack([s.sequence.tokens.astype(np.int64) for s in samples])
        self._check_length(tokens)
        labels = np.array([s.label for s in samples], dtype=np.float64)
        rng = np.random.default_rng(self.config.seed)
        lr, size = self.config.learning_rate, self.config.batch_size

        for epoch in range(self.config.epochs):
            order = rng.permutation(len(samples))
            total = 0.0
            for start in range(0, len(order), size):
                batch = order[start : start + size]
                loss, grads = self.loss_and_gradients(tokens[batch], labels[batch])
                for name, grad in grads.items():
                    self.params[name] -= lr * grad
                total += loss * len(batch)
            self.losses.append(total / len(samples))
            logger.debug(f"Epoch {epoch + 1}/{self.config.epochs}: loss {self.losses[-1]:.4f}")
            if len(self.losses) > 1 and self.losses[-1] > self.losses[-2]:
                logger.warning(f"Training loss rose in epoch {epoch + 1}")
        if self.losses:
            logger.info(f"Neural model trained: {len(self.losses)} epochs, loss {self.losses[-1]:.4f}")

    def score(self, tokens: np.ndarray) -> float:
        tokens = np.asarray(tokens, dtype=np.int64)
        self._check_length(tokens)
        probs, _ = self.forward(tokens[None, :])
        return float(probs[0])


def micro_model(steps: int = 4, seed: int = 0) -> SequenceNet:
    """Two-token vocabulary, 2-d embedding, one hidden unit: ten parameters."""
    model = SequenceNet(TrainingConfig(embed_dim=2, hidden_dim=1, seed=seed), 2, steps)
    rng = np.random.default_rng(seed + 1)
    for name in PARAM_NAMES:
        model.params[name] = rng.normal(0.0, 0.8, model.params[name].shape)
    return model


def gradient_check(
    model: SequenceNet, tokens: np.ndarray, labels: np.ndarray, eps: float = 1e-6
) -> dict[str, float]:
    """Largest relative error between backprop and central differences, per parameter."""
    _, analytic = model.loss_and_gradients(tokens, labels)
    errors = {}
    for name in PARAM_NAMES:
        param = model.params[name]
        worst = 0.0
        for index in np.ndindex(param.shape):
            saved = param[index]
            param[index] = saved + eps
            up = model.loss(tokens, labels)
            param[index] = saved - eps
            down = model.loss(tokens, labels)
            param[index] = saved
            numeric = (up - down) / (2 * eps)
            exact = analytic[name][index]
            scale = max(abs(numeric), abs(exact), 1e-8)
            worst = max(worst, abs(numeric - exact) / scale)
        errors[name] = worst
    return errors
