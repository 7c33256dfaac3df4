"""Tests for the native MD5 core."""

import hashlib
import random

import pytest

from collision_kit.exceptions import BlockAlignmentError, InvalidBlockError
from collision_kit.md5 import (
    IHV0,
    Digest,
    IhvState,
    Md5,
    MessageBlock,
    chain,
    compress,
    digest,
    digest_stream,
    file_digest,
    new_hasher,
    padding,
)

RFC_VECTORS = [
    (b"", "d41d8cd98f00b204e9800998ecf8427e"),
    (b"a", "0cc175b9c0f1b6a831c399e269772661"),
    (b"abc", "900150983cd24fb0d6963f7d28e17f72"),
    (b"message digest", "f96b697d7cb7938d525a2f31aaf161d0"),
    (b"abcdefghijklmnopqrstuvwxyz", "c3fcd3d76192e4007dfb496cca67e13b"),
    (
        b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789",
        "d174ab98d277d9f5a5611c2c9f419d9f",
    ),
    (b"1234567890" * 8, "57edf4a22be3c955ac49da2e2107b67a"),
]


@pytest.mark.parametrize("data,expected", RFC_VECTORS)
def test_rfc_vectors(data, expected):
    assert digest(data).hex == expected
    assert hashlib.md5(data).hexdigest() == expected


def test_initial_state_constants():
    assert IHV0.to_bytes().hex() == "0123456789abcdeffedcba9876543210"


def test_compress_empty_padding_block():
    block = MessageBlock(padding(0))
    assert compress(IHV0, block).to_bytes().hex() == "d41d8cd98f00b204e9800998ecf8427e"


def test_compress_zero_block_matches_oracle():
    zero = bytes(64)
    # 64 zero bytes followed by their padding block
    expected = hashlib.md5(zero).hexdigest()
    state = compress(IHV0, zero)
    assert compress(state, padding(64)).to_bytes().hex() == expected


def test_compress_deterministic():
    block = bytes(range(64))
    assert compress(IHV0, block) == compress(IHV0, block)


def test_chain_empty_is_identity():
    assert chain(IHV0, b"") == IHV0


def test_chain_single_and_double_block():
    a, b = bytes(64), bytes(range(64))
    assert chain(IHV0, a) == compress(IHV0, a)
    assert chain(IHV0, a + b) == compress(compress(IHV0, a), b)


def test_chain_rejects_unaligned():
    with pytest.raises(BlockAlignmentError, match="multiple of 64"):
        chain(IHV0, b"x" * 65)


def test_message_block_length():
    with pytest.raises(InvalidBlockError):
        MessageBlock(b"short")


def test_digest_hex_round_trip():
    d = digest(b"abc")
    assert Digest.from_hex(str(d)) == d
    assert str(d) == str(d).lower()


def test_digest_from_bad_hex():
    with pytest.raises(InvalidBlockError):
        Digest.from_hex("zz" * 16)
    with pytest.raises(InvalidBlockError, match="32 characters"):
        Digest.from_hex("abc")


def test_ihv_state_word_range():
    with pytest.raises(InvalidBlockError):
        IhvState(2**32, 0, 0, 0)


def test_ihv_bytes_round_trip():
    assert IhvState.from_bytes(IHV0.to_bytes()) == IHV0


def test_stream_simple_chunks():
    assert digest_stream([b"ab", b"c"]) == digest(b"abc")
    assert digest_stream([b""]) == digest(b"")


def test_stream_randomized_chunkings():
    rng = random.Random(7)
    for _ in range(100):
        data = rng.randbytes(rng.randrange(0, 600))
        cuts = sorted(rng.sample(range(len(data) + 1), k=min(4, len(data) + 1)))
        chunks = [data[i:j] for i, j in zip([0] + cuts, cuts + [len(data)])]
        assert digest_stream(chunks) == digest(data)


def test_stream_backends_agree():
    chunks = [bytes(range(256)) * 40, b"tail"]
    assert digest_stream(chunks, backend="hashlib") == digest_stream(chunks, backend="native")


def test_stream_unknown_backend():
    with pytest.raises(InvalidBlockError, match="Unknown MD5 backend"):
        digest_stream([b"x"], backend="gpu")


def test_incremental_state_at_block_boundary():
    hasher = Md5()
    hasher.update(b"x" * 100)
    assert hasher.length == 100
    assert hasher.state == chain(IHV0, b"x" * 64)
    assert hasher.hexdigest() == hashlib.md5(b"x" * 100).hexdigest()


def test_resume_from_midstate():
    prefix = bytes(range(128))
    resumed = Md5(chain(IHV0, prefix), len(prefix))
    resumed.update(b"suffix")
    assert resumed.digest() == digest(prefix + b"suffix")


def test_resume_requires_alignment():
    with pytest.raises(BlockAlignmentError):
        Md5(IHV0, 10)


def test_file_digest(tmp_path):
    path = tmp_path / "blob.bin"
    path.write_bytes(b"abc" * 1000)
    assert file_digest(path, backend="native") == digest(b"abc" * 1000)
    assert file_digest(path) == digest(b"abc" * 1000)


def test_extension_property_with_published_pair(published_pair):
    block_a, block_b = published_pair
    assert chain(IHV0, block_a) == chain(IHV0, block_b)
    rng = random.Random(11)
    for _ in range(1000):
        tail = rng.randbytes(rng.randrange(0, 200))
        assert digest(block_a + tail) == digest(block_b + tail)


def test_extension_property_synthetic_equal_chain():
    x = bytes(range(64)) * 2
    for tail in (b"", b"t", bytes(100)):
        assert digest(x + tail) == digest(bytes(x) + tail)


def test_incremental_hashers_agree():
    native, fast = new_hasher("native"), new_hasher("hashlib")
    for chunk in (b"a" * 63, b"b" * 65, b"", b"c"):
        native.update(chunk)
        fast.update(chunk)
    assert native.digest() == fast.digest() == digest(b"a" * 63 + b"b" * 65 + b"c")
    with pytest.raises(InvalidBlockError, match="Unknown MD5 backend"):
        new_hasher("gpu")
