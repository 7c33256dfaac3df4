"""Space freeing for text carriers: whitespace collapse, then stopword removal."""

from __future__ import annotations

import logging
import re

from collision_kit.exceptions import InsufficientCapacityError, StealthError
from collision_kit.stealth.models import CompressionOutcome, RemovedSpan

logger = logging.getLogger(__name__)

DEFAULT_STOPWORDS = (
    "a", "an", "and", "are", "as", "at", "be", "but", "by", "for", "if", "in",
    "into", "is", "it", "no", "not", "of", "on", "or", "such", "that", "the",
    "their", "then", "there", "these", "they", "this", "to", "was", "will", "with",
)  # fmt: skip

_WHITESPACE_RUN = re.compile(rb"[ \t\r\n]{2,}")


def _stopword_pattern(stopwords: tuple[str, ...]) -> re.Pattern[bytes]:
    words = b"|".join(re.escape(w.encode()) for w in sorted(stopwords, key=len, reverse=True))
    return re.compile(rb"(?<![A-Za-z0-9'])(?:" + words + rb")[ \t\r\n]", re.IGNORECASE)


def trim_text(
    data: bytes,
    min_bytes_freed: int,
    stopwords: tuple[str, ...] = DEFAULT_STOPWORDS,
) -> CompressionOutcome:
    """Free at least ``min_bytes_freed`` bytes from UTF-8 text.

    Whitespace runs are collapsed to a single space in order of appearance; if
    that is not enough, stopwords are dropped together with the whitespace
    character after them. Spans are recorded in input offsets.

    Raises:
        InsufficientCapacityError: Both passes together free too little.
    """
    try:
        data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise StealthError(f"Input is not UTF-8 text: {e}") from e
    if min_bytes_freed <= 0:
        return CompressionOutcome(data, 0, [])

    spans: list[RemovedSpan] = []
    freed = 0
    for match in _WHITESPACE_RUN.finditer(data):
        if freed >= min_bytes_freed:
            break
        spans.append(RemovedSpan(match.start(), match.end() - match.start(), b" "))
        freed += spans[-1].removed

    if freed < min_bytes_freed and stopwords:
        collapsed = {span.offset for span in spans}
        for match in _stopword_pattern(tuple(stopwords)).finditer(data):
            if freed >= min_bytes_freed:
                break
            end = match.end()
            # the trailing whitespace already belongs to a collapsed run
            if end - 1 in collapsed:
                end -= 1
            spans.append(RemovedSpan(match.start(), end - match.start()))
            freed += spans[-1].removed

    if freed < min_bytes_freed:
        raise InsufficientCapacityError(
            f"Text trimming can free {freed} bytes, {min_bytes_freed} requested"
        )

    out = bytearray()
    pos = 0
    for span in sorted(spans, key=lambda s: s.offset):
        out += data[pos : span.offset] + span.replacement
        pos = span.offset + span.length
    out += data[pos:]
    logger.info(f"Trimmed {len(spans)} spans from text, freed {freed} bytes")
    return CompressionOutcome(bytes(out), freed, spans)
