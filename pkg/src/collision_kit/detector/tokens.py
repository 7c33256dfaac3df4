"""Byte-pair tokens and window similarity."""

from __future__ import annotations

import numpy as np

from collision_kit.detector.models import TokenSequence


def tokenize(data: bytes) -> np.ndarray:
    """Big-endian 16-bit tokens of consecutive byte pairs; an odd trailing byte is dropped."""
    usable = len(data) & ~1
    return np.frombuffer(data, dtype=">u2", count=usable // 2).astype(np.uint16)


def windows(tokens: np.ndarray, size: int, start_offset: int = 0) -> list[TokenSequence]:
    """Consecutive non-overlapping windows of ``size`` tokens; a partial tail is dropped."""
    count = len(tokens) // size
    return [
        TokenSequence(tokens[i * size : (i + 1) * size], start_offset + 2 * i * size)
        for i in range(count)
    ]


def jaccard(a: TokenSequence | np.ndarray, b: TokenSequence | np.ndarray) -> float:
    """|A ∩ B| / |A ∪ B| of the token sets; 1.0 when both are empty."""
    set_a = np.unique(a.tokens if isinstance(a, TokenSequence) else a)
    set_b = np.unique(b.tokens if isinstance(b, TokenSequence) else b)
    union = len(np.union1d(set_a, set_b))
    if union == 0:
        return 1.0
    return len(np.intersect1d(set_a, set_b, assume_unique=True)) / union
