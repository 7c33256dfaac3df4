"""Checksum and size table for an assembled pair."""

from __future__ import annotations

from collision_kit.md5.core import digest_stream
from collision_kit.stealth.models import StealthPair

DEFAULT_LABELS = ("clean", "poisoned")


def checksum_table(entries: list[tuple[str, bytes]]) -> str:
    rows = ["# label\tmd5\tsize"]
    for label, data in entries:
        rows.append(f"{label}\t{digest_stream([data], backend='hashlib').hex}\t{len(data)}")
    return "\n".join(rows) + "\n"


def table1_report(pair: StealthPair, labels: tuple[str, str] | None = None) -> str:
    """Tab-separated rows of label, MD5 and size, one per file."""
    labels = labels or DEFAULT_LABELS
    return checksum_table(list(zip(labels, (pair.col_c, pair.col_p))))
