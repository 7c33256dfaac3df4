"""Tests for file-level collision verification."""

import pytest

from collision_kit.engine.verify import first_diff, verify_collision
from collision_kit.exceptions import CollisionEngineError


def test_identical_files(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    a.write_bytes(b"same bytes")
    b.write_bytes(b"same bytes")
    report = verify_collision(a, b)
    assert report.md5_equal and report.size_equal
    assert report.first_diff_offset is None
    assert not report.is_collision


def test_published_pair_inside_shared_prefix_and_suffix(tmp_path, published_pair):
    prefix, suffix = b"", b"shared tail" * 100
    a, b = tmp_path / "a", tmp_path / "b"
    a.write_bytes(prefix + published_pair[0] + suffix)
    b.write_bytes(prefix + published_pair[1] + suffix)
    report = verify_collision(a, b)
    assert report.md5_equal and report.size_equal
    assert 0 <= report.first_diff_offset < 128
    assert report.is_collision


def test_different_lengths(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    a.write_bytes(b"abc")
    b.write_bytes(b"abcd")
    report = verify_collision(a, b)
    assert not report.size_equal
    assert report.first_diff_offset == 3


def test_first_diff_across_chunks(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    data = bytes(1000)
    a.write_bytes(data)
    b.write_bytes(data[:777] + b"\x01" + data[778:])
    assert first_diff(a, b, chunk_size=64) == 777


def test_missing_file(tmp_path):
    a = tmp_path / "a"
    a.write_bytes(b"x")
    with pytest.raises(CollisionEngineError, match="failed"):
        verify_collision(a, tmp_path / "missing")
