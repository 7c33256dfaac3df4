"""Similarity-prefiltered scanning of whole files, and window-level evaluation.

The file is cut into JS windows. When two successive Jaccard values
``J(F_i, F_i+1)`` and ``J(F_i+1, F_i+2)`` are both at or below ``tau``, windows
``i - 1``, ``i`` and ``i + 1`` become candidates, clamped at the file start.
Each candidate is scored by the classifier window on the ``window_bytes`` grid
that contains it.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor

from collision_kit.detector.base import BaseClassifier
from collision_kit.detector.models import (
    JS_WINDOW_TOKENS,
    POSITIVE,
    WINDOW_BYTES,
    Candidate,
    DetectionReport,
    EvaluationRow,
)
from collision_kit.detector.tokens import jaccard, tokenize, windows
from collision_kit.exceptions import DetectorError

logger = logging.getLogger(__name__)

MODE_WITH_JS = "with-js"
MODE_WITHOUT_JS = "without-js"


def _merge(ranges: list[tuple[int, int]]) -> list[tuple[int, int]]:
    merged: list[tuple[int, int]] = []
    for start, end in sorted(ranges):
        if merged and start <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], end))
        else:
            merged.append((start, end))
    return merged


def scan_file(
    data: bytes,
    model: BaseClassifier,
    tau: float = 0.0,
    js_window_tokens: int = JS_WINDOW_TOKENS,
    window_bytes: int = WINDOW_BYTES,
    workers: int = 1,
) -> DetectionReport:
    """Find and classify windows that look unlike their neighbours.

    ``tau = 1`` disables the prefilter: every window becomes a candidate.
    """
    tokens = tokenize(data)
    frames = windows(tokens, js_window_tokens)
    m = len(frames)
    if m < 3:
        return DetectionReport(m, tau=tau, diagnostic=f"File has {m} windows, at least 3 needed")

    js = [jaccard(frames[i], frames[i + 1]) for i in range(m - 1)]
    picked: set[int] = set()
    for i in range(m - 2):
        if js[i] <= tau and js[i + 1] <= tau:
            picked.update(range(max(0, i - 1), i + 2))
    logger.debug(f"{len(picked)} of {m} windows pass the JS filter at tau={tau}")

    usable = (len(tokens) * 2 // window_bytes) * window_bytes
    window_tokens = window_bytes // 2

    def start_of(index: int) -> int | None:
        if usable == 0:
            return None
        return min((frames[index].offset // window_bytes) * window_bytes, usable - window_bytes)

    starts = sorted({s for s in map(start_of, picked) if s is not None})

    def classify(start: int) -> tuple[int, float]:
        return model.predict(tokens[start // 2 : start // 2 + window_tokens])

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            scores = dict(zip(starts, pool.map(classify, starts)))
    else:
        scores = {start: classify(start) for start in starts}

    candidates = []
    for index in sorted(picked):
        start = start_of(index)
        if start is None:
            continue
        label, score = scores[start]
        neighbours = [js[j] for j in (index - 1, index) if 0 <= j < m - 1]
        frame = frames[index]
        candidates.append(Candidate(frame.offset, 2 * len(frame), min(neighbours), score, label))

    flagged = _merge([(c.offset, c.offset + c.length) for c in candidates if c.label == POSITIVE])
    report = DetectionReport(m, candidates, flagged, js_evaluations=len(js), tau=tau)
    logger.info(
        f"Scanned {m} windows: {report.candidate_count} candidates, {len(flagged)} flagged regions"
    )
    return report


def _overlaps(start: int, end: int, truth: list[tuple[int, int]]) -> bool:
    return any(start < t_end and t_start < end for t_start, t_end in truth)


def evaluate(
    report: DetectionReport,
    truth: list[tuple[int, int]],
    baseline: DetectionReport | None = None,
    js_window_tokens: int = JS_WINDOW_TOKENS,
) -> list[EvaluationRow]:
    """Window-level precision, recall and F1 against inserted regions.

    ``baseline`` is the same file scanned with the filter disabled; when given
    a second row compares classifying every window.
    """
    rows = [_score(MODE_WITH_JS, report, truth, js_window_tokens)]
    if baseline is not None:
        rows.append(_score(MODE_WITHOUT_JS, baseline, truth, js_window_tokens))
    return rows


def _score(
    mode: str, report: DetectionReport, truth: list[tuple[int, int]], js_window_tokens: int
) -> EvaluationRow:
    size = 2 * js_window_tokens
    actual = {i for i in range(report.windows_total) if _overlaps(i * size, (i + 1) * size, truth)}
    predicted = {c.offset // size for c in report.candidates if c.label == POSITIVE}
    tp = len(actual & predicted)
    fp = len(predicted - actual)
    fn = len(actual - predicted)
    precision = tp / (tp + fp) if tp + fp else (1.0 if not actual else 0.0)
    recall = tp / (tp + fn) if tp + fn else 1.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return EvaluationRow(mode, report.candidate_count, precision, recall, f1, tp, fp, fn)


def evaluate_file(
    data: bytes,
    model: BaseClassifier,
    truth: list[tuple[int, int]],
    tau: float = 0.0,
    js_window_tokens: int = JS_WINDOW_TOKENS,
) -> list[EvaluationRow]:
    """Scan with and without the prefilter and score both."""
    report = scan_file(data, model, tau, js_window_tokens)
    baseline = scan_file(data, model, 1.0, js_window_tokens)
    return evaluate(report, truth, baseline, js_window_tokens)


def format_report(report: DetectionReport) -> str:
    """Tab-separated ``offset js score label`` lines with a summary footer."""
    lines = ["# offset\tjs\tscore\tlabel"]
    for c in report.candidates:
        lines.append(f"{c.offset}\t{c.js:.6f}\t{c.score:.6f}\t{c.label}")
    lines.append(
        f"# windows={report.windows_total} candidates={report.candidate_count} "
        f"flagged={report.flagged_count} js_evaluations={report.js_evaluations} tau={report.tau}"
    )
    if report.diagnostic:
        lines.append(f"# diagnostic: {report.diagnostic}")
    return "\n".join(lines) + "\n"


def parse_report(text: str, js_window_tokens: int = JS_WINDOW_TOKENS) -> DetectionReport:
    candidates = []
    summary: dict[str, str] = {}
    for line in text.splitlines():
        if line.startswith("# windows="):
            summary = dict(item.split("=", 1) for item in line[2:].split())
        elif line and not line.startswith("#"):
            try:
                offset, js, score, label = line.split("\t")
                candidates.append(
                    Candidate(int(offset), 2 * js_window_tokens, float(js), float(score), int(label))
                )
            except ValueError as e:
                raise DetectorError(f"Malformed report line {line!r}: {e}") from e
    positive = [(c.offset, c.offset + c.length) for c in candidates if c.label == POSITIVE]
    return DetectionReport(
        int(summary.get("windows", 0)),
        candidates,
        _merge(positive),
        js_evaluations=int(summary.get("js_evaluations", 0)),
        tau=float(summary.get("tau", 0.0)),
    )


def format_evaluation(rows: list[EvaluationRow]) -> str:
    lines = ["# mode\tsamples\tprecision\trecall\tf1\ttp\tfp\tfn"]
    for r in rows:
        lines.append(
            f"{r.mode}\t{r.samples}\t{r.precision:.4f}\t{r.recall:.4f}\t{r.f1:.4f}"
            f"\t{r.true_positives}\t{r.false_positives}\t{r.false_negatives}"
        )
    return "\n".join(lines) + "\n"
