"""Running-mean Jaccard similarity of clean and collision windows.

Window pairs are drawn at random from the two sources; the mean similarity of
clean/clean pairs settles well above the collision/collision and
clean/collision means.
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from collision_kit.detector.models import JS_WINDOW_TOKENS
from collision_kit.detector.tokens import jaccard, tokenize, windows
from collision_kit.exceptions import TheoryError
from collision_kit.theory.models import ConvergenceCurves

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 10_000


def _require_pyplot():
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        raise ImportError(
            "matplotlib is required for plot_convergence. "
            "Install with: pip install collision-kit[plot]"
        )
    return plt


def _pool(data: bytes, window_tokens: int, name: str) -> list[np.ndarray]:
    pool = [w.tokens for w in windows(tokenize(data), window_tokens)]
    if len(pool) < 2:
        raise TheoryError(
            f"{name} source holds {len(pool)} windows of {window_tokens} tokens, at least 2 needed"
        )
    return pool


def _pair_indices(rng: np.random.Generator, size: int, samples: int) -> tuple[np.ndarray, np.ndarray]:
    first = rng.integers(0, size, samples)
    # Shift by 1..size-1 so the two windows of a pair are never the same one.
    second = (first + rng.integers(1, size, samples)) % size
    return first, second


def _running_mean(values: np.ndarray) -> np.ndarray:
    return np.cumsum(values) / np.arange(1, len(values) + 1)


def js_convergence(
    clean: bytes,
    collision: bytes,
    window_tokens: int = JS_WINDOW_TOKENS,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> ConvergenceCurves:
    """Running means of Jaccard similarity over ``samples`` random window pairs.

    Raises:
        TheoryError: A source yields fewer than two windows, or ``samples`` < 1.
    """
    if samples < 1:
        raise TheoryError(f"Need at least one sample, got {samples}")
    clean_pool = _pool(clean, window_tokens, "Clean")
    collision_pool = _pool(collision, window_tokens, "Collision")
    rng = np.random.default_rng(seed)

    i, j = _pair_indices(rng, len(clean_pool), samples)
    clean_clean = np.array([jaccard(clean_pool[a], clean_pool[b]) for a, b in zip(i, j)])
    i, j = _pair_indices(rng, len(collision_pool), samples)
    coll_coll = np.array([jaccard(collision_pool[a], collision_pool[b]) for a, b in zip(i, j)])
    i = rng.integers(0, len(clean_pool), samples)
    j = rng.integers(0, len(collision_pool), samples)
    cross = np.array([jaccard(clean_pool[a], collision_pool[b]) for a, b in zip(i, j)])

    curves = ConvergenceCurves(
        _running_mean(clean_clean),
        _running_mean(coll_coll),
        _running_mean(cross),
        window_tokens=window_tokens,
        seed=seed,
    )
    means = curves.final_means()
    logger.info(
        f"JS means after {samples} pairs: clean {means[0]:.5f}, collision {means[1]:.5f}, "
        f"cross {means[2]:.5f}"
    )
    return curves


def format_curves(curves: ConvergenceCurves, step: int = 100) -> str:
    """Tab-separated curve points every ``step`` samples, plus the last one."""
    lines = [
        f"# window_tokens={curves.window_tokens} seed={curves.seed}",
        "# samples\t" + "\t".join(label.replace("-", "_") for label in curves.labels),
    ]
    points = list(range(step - 1, curves.samples, step))
    if not points or points[-1] != curves.samples - 1:
        points.append(curves.samples - 1)
    for k in points:
        lines.append(
            f"{k + 1}\t{curves.clean_clean[k]:.6f}\t{curves.collision_collision[k]:.6f}"
            f"\t{curves.clean_collision[k]:.6f}"
        )
    return "\n".join(lines) + "\n"


def plot_convergence(curves: ConvergenceCurves, path: Path | str) -> Path:
    """Draw the three curves on a log sample axis and save to ``path``."""
    plt = _require_pyplot()
    x = np.arange(1, curves.samples + 1)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, curve in zip(
        curves.labels, (curves.clean_clean, curves.collision_collision, curves.clean_collision)
    ):
        ax.plot(x, curve, label=label, linewidth=1.5)
    ax.set_xscale("log")
    ax.set_xlabel("Sampled pairs")
    ax.set_ylabel("Mean Jaccard similarity")
    ax.legend(frameon=False)
    path = Path(path)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    logger.info(f"Wrote convergence plot to {path}")
    return path
