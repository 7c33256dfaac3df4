"""Collision-byte detection: byte-pair tokens, window classifiers and prefiltered scanning."""

from collision_kit.detector.base import BaseClassifier
from collision_kit.detector.bayes import TokenBayes
from collision_kit.detector.dataset import (
    format_truth,
    insert_regions,
    make_training_set,
    make_transfer_set,
    parse_truth,
    split_samples,
)
from collision_kit.detector.model_io import load_model, parse_model, save_model, serialize_model
from collision_kit.detector.models import (
    JS_WINDOW_TOKENS,
    KIND_BAYES,
    KIND_NEURAL,
    NEGATIVE,
    POSITIVE,
    WINDOW_BYTES,
    Candidate,
    DetectionReport,
    EvaluationRow,
    LabeledSample,
    TokenSequence,
    TrainingConfig,
)
from collision_kit.detector.neural import SequenceNet, gradient_check, micro_model
from collision_kit.detector.scan import (
    evaluate,
    evaluate_file,
    format_evaluation,
    format_report,
    parse_report,
    scan_file,
)
from collision_kit.detector.tokens import jaccard, tokenize, windows
from collision_kit.detector.train import format_matrix, predict, train, transfer_matrix

__all__ = [
    "JS_WINDOW_TOKENS",
    "KIND_BAYES",
    "KIND_NEURAL",
    "NEGATIVE",
    "POSITIVE",
    "WINDOW_BYTES",
    "BaseClassifier",
    "Candidate",
    "DetectionReport",
    "EvaluationRow",
    "LabeledSample",
    "SequenceNet",
    "TokenBayes",
    "TokenSequence",
    "TrainingConfig",
    "evaluate",
    "evaluate_file",
    "format_evaluation",
    "format_matrix",
    "format_report",
    "format_truth",
    "gradient_check",
    "insert_regions",
    "jaccard",
    "load_model",
    "make_training_set",
    "make_transfer_set",
    "micro_model",
    "parse_model",
    "parse_report",
    "parse_truth",
    "predict",
    "save_model",
    "scan_file",
    "serialize_model",
    "split_samples",
    "tokenize",
    "train",
    "transfer_matrix",
    "windows",
]
