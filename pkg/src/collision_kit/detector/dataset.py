"""Labeled windows for training and evaluation, and the ground-truth insertion harness."""

from __future__ import annotations

import logging

import numpy as np

from collision_kit.detector.models import (
    NEGATIVE,
    POSITIVE,
    WINDOW_BYTES,
    LabeledSample,
    TokenSequence,
)
from collision_kit.detector.tokens import tokenize
from collision_kit.exceptions import TrainingDataError

logger = logging.getLogger(__name__)

PHASES = 4


def _labeled_windows(
    source: bytes,
    material: bytes,
    window_bytes: int,
    seed: int,
    count: int | None,
) -> list[LabeledSample]:
    if window_bytes <= 0 or window_bytes % 4:
        raise TrainingDataError(f"Window of {window_bytes} bytes must be a positive multiple of 4")
    half = window_bytes // 2
    if len(material) < half:
        raise TrainingDataError(
            f"Need at least {half} bytes of collision material, got {len(material)}"
        )
    stride = window_bytes + PHASES
    slots = len(source) // stride
    pairs = slots // 2 if count is None else count
    if pairs < 1 or 2 * pairs > slots:
        raise TrainingDataError(
            f"Source of {len(source)} bytes has {slots} windows, {2 * max(pairs, 1)} needed"
        )

    rng = np.random.default_rng(seed)
    order = rng.permutation(slots)
    samples = []
    # Slots are disjoint; each window starts at a random byte phase inside its slot.
    for slot in order[:pairs]:
        start = int(slot) * stride + int(rng.integers(0, PHASES))
        cut = int(rng.integers(0, (len(material) - half) // 2 + 1)) * 2
        window = source[start : start + half] + material[cut : cut + half]
        samples.append(LabeledSample(TokenSequence(tokenize(window), start), POSITIVE))
    for slot in order[pairs : 2 * pairs]:
        start = int(slot) * stride + int(rng.integers(0, PHASES))
        window = source[start : start + window_bytes]
        samples.append(LabeledSample(TokenSequence(tokenize(window), start), NEGATIVE))
    return [samples[i] for i in rng.permutation(len(samples))]


def make_training_set(
    source: bytes,
    collision_suffixes: list[bytes],
    window_bytes: int = WINDOW_BYTES,
    seed: int = 0,
    count: int | None = None,
) -> list[LabeledSample]:
    """Balanced samples: half source and half collision bytes against pure source.

    Args:
        source: Clean file the windows are cut from.
        collision_suffixes: Identical-prefix collision suffixes (positives' second half).
        window_bytes: Window length in bytes.
        seed: Sampling seed.
        count: Samples per class; defaults to as many as the source allows.

    Raises:
        TrainingDataError: No suffixes, or too little source.
    """
    if not collision_suffixes:
        raise TrainingDataError("No collision suffixes given")
    samples = _labeled_windows(source, b"".join(collision_suffixes), window_bytes, seed, count)
    logger.info(f"Built {len(samples)} training samples from {len(collision_suffixes)} suffixes")
    return samples


def make_transfer_set(
    target: bytes,
    cpc_material: bytes,
    window_bytes: int = WINDOW_BYTES,
    seed: int = 0,
    count: int | None = None,
) -> list[LabeledSample]:
    """Test samples from a different clean file and chosen-prefix suffix bytes."""
    samples = _labeled_windows(target, cpc_material, window_bytes, seed, count)
    logger.info(f"Built {len(samples)} transfer samples")
    return samples


def split_samples(
    samples: list[LabeledSample], test_fraction: float = 0.2, seed: int = 0
) -> tuple[list[LabeledSample], list[LabeledSample]]:
    """Stratified train/test split."""
    rng = np.random.default_rng(seed)
    train: list[LabeledSample] = []
    test: list[LabeledSample] = []
    for label in (NEGATIVE, POSITIVE):
        group = [s for s in samples if s.label == label]
        order = rng.permutation(len(group))
        cut = int(round(len(group) * test_fraction))
        test += [group[i] for i in order[:cut]]
        train += [group[i] for i in order[cut:]]
    return train, test


def insert_regions(
    data: bytes,
    regions: list[bytes],
    seed: int = 0,
    window_bytes: int = WINDOW_BYTES,
) -> tuple[bytes, list[tuple[int, int]]]:
    """Splice ``regions`` into ``data`` at distinct window-aligned offsets.

    Returns:
        The new bytes and the ``[start, end)`` byte range of every region in them.
    """
    slots = len(data) // window_bytes
    if len(regions) > slots:
        raise TrainingDataError(f"{len(regions)} regions do not fit in {slots} windows")
    rng = np.random.default_rng(seed)
    picked = sorted(int(s) for s in rng.choice(np.arange(1, slots + 1), len(regions), replace=False))

    out = bytearray()
    truth = []
    pos = 0
    for slot, region in zip(picked, regions):
        at = slot * window_bytes
        out += data[pos:at]
        truth.append((len(out), len(out) + len(region)))
        out += region
        pos = at
    out += data[pos:]
    logger.debug(f"Inserted {len(regions)} regions at {[start for start, _ in truth]}")
    return bytes(out), truth


def format_truth(truth: list[tuple[int, int]]) -> str:
    return "".join(f"{start}\t{end}\n" for start, end in truth)


def parse_truth(text: str) -> list[tuple[int, int]]:
    """``start<TAB>end`` lines; ``#`` lines are skipped."""
    truth = []
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        try:
            start, end = (int(v) for v in line.split())
        except ValueError as e:
            raise TrainingDataError(f"Malformed truth line {line!r}: {e}") from e
        truth.append((start, end))
    return truth
