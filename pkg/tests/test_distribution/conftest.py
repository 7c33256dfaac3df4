"""Variant files built from the published pair."""

import pytest

from collision_kit.md5 import digest


@pytest.fixture
def variants(tmp_path, published_pair):
    tail = b"\x5a" * 1000
    clean, poisoned = tmp_path / "clean.bin", tmp_path / "poisoned.bin"
    clean.write_bytes(published_pair[0] + tail)
    poisoned.write_bytes(published_pair[1] + tail)
    return clean, poisoned, digest(published_pair[0] + tail)


@pytest.fixture
def route_config(tmp_path, variants):
    clean, poisoned, md5 = variants
    path = tmp_path / "routes.conf"
    path.write_text(
        "# zoo routing\n"
        f"md5 = {md5.hex}\n"
        "default = clean.bin\n"
        "127.0.0.2 = poisoned.bin   # the target\n"
        "10.20.0.0/16 = poisoned.bin\n"
    )
    return path
