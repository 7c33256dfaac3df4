"""Tests for CDM1 model files."""

import hashlib

import numpy as np
import pytest

from collision_kit.detector.model_io import (
    _HEADER,
    load_model,
    parse_model,
    save_model,
    serialize_model,
)
from collision_kit.detector.models import TrainingConfig
from collision_kit.detector.neural import SequenceNet
from collision_kit.exceptions import ModelFormatError


def test_bayes_round_trip(tmp_path, bayes_model, training_set):
    path = tmp_path / "bayes.cdm"
    save_model(bayes_model, path)
    loaded = load_model(path)
    assert loaded.kind == "bayes"
    assert np.array_equal(loaded.counts, bayes_model.counts)
    for sample in training_set[:10]:
        assert loaded.predict(sample.sequence)[0] == bayes_model.predict(sample.sequence)[0]


def test_neural_round_trip():
    model = SequenceNet(TrainingConfig(embed_dim=4, hidden_dim=3, seed=2, epochs=7), 32, 6)
    model.losses = [0.7, 0.5]
    loaded = parse_model(serialize_model(model))
    assert isinstance(loaded, SequenceNet)
    assert loaded.window_tokens == 6 and loaded.config.epochs == 7
    assert loaded.losses == pytest.approx([0.7, 0.5], rel=1e-6)
    for name, value in model.params.items():
        assert np.allclose(loaded.params[name], value, atol=1e-6)
    tokens = np.arange(6, dtype=np.uint16)
    assert loaded.score(tokens) == pytest.approx(model.score(tokens), abs=1e-5)


def test_bad_magic():
    with pytest.raises(ModelFormatError, match="Bad magic"):
        parse_model(b"NOPE" + bytes(64))


def test_checksum_mismatch(bayes_model):
    data = bytearray(serialize_model(bayes_model))
    data[40] ^= 0xFF
    with pytest.raises(ModelFormatError, match="checksum"):
        parse_model(bytes(data))


def test_missing_file(tmp_path):
    with pytest.raises(ModelFormatError, match="Reading model"):
        load_model(tmp_path / "absent.cdm")


def test_trailer_is_md5_of_payload():
    model = SequenceNet(TrainingConfig(embed_dim=2, hidden_dim=2), 8, 4)
    data = serialize_model(model)
    payload = data[_HEADER.size : -16]
    assert len(payload) == 4 * sum(p.size for p in model.params.values())
    assert data[-16:] == hashlib.md5(payload).digest()
