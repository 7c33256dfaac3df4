"""Size-preserving collision pipeline: compress, collide, pad."""

from collision_kit.stealth.assemble import (
    DEFAULT_MIN_FREED,
    align_prefix,
    assemble_cpc,
    assemble_ipc_demo,
    enhance_pair,
    make_fill,
    pad_to_size,
)
from collision_kit.stealth.manifest import read_manifest, write_manifest
from collision_kit.stealth.models import (
    FILL_RANDOM,
    FILL_ZEROS,
    CompressionOutcome,
    QuantizedSpan,
    RemovedSpan,
    StealthManifest,
    StealthPair,
    Tensor,
    ToyWeightFile,
)
from collision_kit.stealth.report import checksum_table, table1_report
from collision_kit.stealth.text import DEFAULT_STOPWORDS, trim_text
from collision_kit.stealth.weights import (
    make_toy_weights,
    parse_weights,
    quantize_weights,
    serialize_weights,
)

__all__ = [
    "DEFAULT_MIN_FREED",
    "DEFAULT_STOPWORDS",
    "FILL_RANDOM",
    "FILL_ZEROS",
    "CompressionOutcome",
    "QuantizedSpan",
    "RemovedSpan",
    "StealthManifest",
    "StealthPair",
    "Tensor",
    "ToyWeightFile",
    "align_prefix",
    "assemble_cpc",
    "assemble_ipc_demo",
    "checksum_table",
    "enhance_pair",
    "make_fill",
    "make_toy_weights",
    "pad_to_size",
    "parse_weights",
    "quantize_weights",
    "read_manifest",
    "serialize_weights",
    "table1_report",
    "trim_text",
    "write_manifest",
]
