"""CDM1 model files.

Layout (little-endian): magic ``CDM1``, kind u8 (0 Bayes, 1 neural), vocab
u32, embed u32, hidden u32, window tokens u32, seed u32, epochs u16, learning
rate f32, loss count u16; then the payload: the loss curve and every parameter
as f32. The file ends with the MD5 of the payload.
"""

from __future__ import annotations

import logging
import struct
from pathlib import Path

import numpy as np

from collision_kit.detector.base import BaseClassifier
from collision_kit.detector.bayes import TokenBayes
from collision_kit.detector.models import KIND_BAYES, KIND_NEURAL, TrainingConfig
from collision_kit.detector.neural import PARAM_NAMES, SequenceNet
from collision_kit.exceptions import ModelFormatError
from collision_kit.md5.core import digest_stream
from collision_kit.md5.models import DIGEST_SIZE

logger = logging.getLogger(__name__)

MAGIC = b"CDM1"
_HEADER = struct.Struct("<4sBIIIIIHfH")
_KIND_CODES = {KIND_BAYES: 0, KIND_NEURAL: 1}


def _md5(data: bytes) -> bytes:
    return digest_stream([data], backend="hashlib").data


def serialize_model(model: BaseClassifier) -> bytes:
    config = model.config
    if isinstance(model, TokenBayes):
        arrays = [model.class_counts, model.counts]
        dims = (model.vocab_size, 0, 0, 0)
    elif isinstance(model, SequenceNet):
        arrays = [model.params[name] for name in PARAM_NAMES]
        dims = (model.vocab_size, config.embed_dim, config.hidden_dim, model.window_tokens)
    else:
        raise ModelFormatError(f"Cannot serialize model of type {type(model).__name__}")
    header = _HEADER.pack(
        MAGIC,
        _KIND_CODES[model.kind],
        *dims,
        config.seed,
        config.epochs,
        config.learning_rate,
        len(model.losses),
    )
    payload = b"".join(
        np.asarray(a, dtype="<f4").tobytes() for a in [np.array(model.losses), *arrays]
    )
    return header + payload + _md5(payload)


def parse_model(data: bytes) -> BaseClassifier:
    if data[:4] != MAGIC:
        raise ModelFormatError("Bad magic: not a CDM1 model")
    if len(data) < _HEADER.size + DIGEST_SIZE:
        raise ModelFormatError("Truncated CDM1 header")
    payload, checksum = data[_HEADER.size : -DIGEST_SIZE], data[-DIGEST_SIZE:]
    if _md5(payload) != checksum:
        raise ModelFormatError("Model payload checksum mismatch")

    if len(payload) % 4:
        raise ModelFormatError("Payload is not a whole number of f32 values")
    _, code, vocab, embed, hidden, window, seed, epochs, lr, n_losses = _HEADER.unpack_from(data)
    values = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    config = TrainingConfig(
        epochs=epochs,
        learning_rate=float(lr),
        embed_dim=embed or TrainingConfig.embed_dim,
        hidden_dim=hidden or TrainingConfig.hidden_dim,
        seed=seed,
    )

    if code == _KIND_CODES[KIND_BAYES]:
        model: BaseClassifier = TokenBayes(config, vocab)
        shapes = [(2,), (2, vocab)]
    elif code == _KIND_CODES[KIND_NEURAL]:
        model = SequenceNet(config, vocab, window)
        shapes = [model.params[name].shape for name in PARAM_NAMES]
    else:
        raise ModelFormatError(f"Unknown model kind code {code}")

    expected = n_losses + sum(int(np.prod(s)) for s in shapes)
    if len(values) != expected:
        raise ModelFormatError(f"Payload holds {len(values)} values, header implies {expected}")

    model.losses = values[:n_losses].tolist()
    pos = n_losses
    arrays = []
    for shape in shapes:
        size = int(np.prod(shape))
        arrays.append(values[pos : pos + size].reshape(shape))
        pos += size
    if isinstance(model, TokenBayes):
        model.set_counts(arrays[1], arrays[0])
    else:
        model.params = {name: array.copy() for name, array in zip(PARAM_NAMES, arrays)}
    return model


def save_model(model: BaseClassifier, path: Path | str) -> None:
    Path(path).write_bytes(serialize_model(model))
    logger.info(f"Saved {model.kind} model to {path}")


def load_model(path: Path | str) -> BaseClassifier:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise ModelFormatError(f"Reading model {path} failed: {e}") from e
    return parse_model(data)
