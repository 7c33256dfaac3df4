"""File-level collision verification."""

from __future__ import annotations

import logging
from pathlib import Path

from collision_kit.engine.models import CollisionReport
from collision_kit.exceptions import CollisionEngineError
from collision_kit.md5.core import DEFAULT_CHUNK_SIZE, file_digest

logger = logging.getLogger(__name__)


def first_diff(
    path_a: Path | str, path_b: Path | str, chunk_size: int = DEFAULT_CHUNK_SIZE
) -> int | None:
    """Offset of the first differing byte, or ``None`` if the files are identical.

    When one file is a strict prefix of the other the offset is the shorter length.
    """
    offset = 0
    with open(path_a, "rb") as fa, open(path_b, "rb") as fb:
        while True:
            a = fa.read(chunk_size)
            b = fb.read(chunk_size)
            if a != b:
                for i, (x, y) in enumerate(zip(a, b)):
                    if x != y:
                        return offset + i
                return offset + min(len(a), len(b))
            if not a:
                return None
            offset += len(a)


def verify_collision(path_a: Path | str, path_b: Path | str) -> CollisionReport:
    """Compare two files by streaming digest, size and first differing byte."""
    try:
        size_a = Path(path_a).stat().st_size
        size_b = Path(path_b).stat().st_size
        digest_a = file_digest(path_a)
        digest_b = file_digest(path_b)
        offset = first_diff(path_a, path_b)
    except OSError as e:
        raise CollisionEngineError(f"Verification of {path_a} and {path_b} failed: {e}") from e
    report = CollisionReport(
        md5_equal=digest_a == digest_b,
        size_equal=size_a == size_b,
        first_diff_offset=offset,
        digest_a=digest_a,
        digest_b=digest_b,
        size_a=size_a,
        size_b=size_b,
    )
    logger.info(
        f"verify {path_a} vs {path_b}: md5_equal={report.md5_equal} "
        f"size_equal={report.size_equal} first_diff={report.first_diff_offset}"
    )
    return report
