"""Identical-prefix collision search, chosen-prefix scaffolding and verification."""

from collision_kit.engine.base import CollisionEngine, KnownPairEngine, NativeEngine
from collision_kit.engine.birthday import (
    DEFAULT_K,
    birthday_cost,
    birthday_search,
    padding_bits,
    verify_birthday_pair,
)
from collision_kit.engine.bundle import (
    bundle_collides,
    bundle_suffixes,
    ingest_cpc_bundle,
    parse_cpc_bundle,
    serialize_cpc_bundle,
    write_cpc_bundle,
)
from collision_kit.engine.models import (
    IPC_SUFFIX_LEN,
    BitString,
    CollisionReport,
    CpcSide,
    CpcSuffixBundle,
    IpcSuffixPair,
    PrefixContext,
)
from collision_kit.engine.path import REFERENCE_PAIR_A, REFERENCE_PAIR_B
from collision_kit.engine.search import find_ipc_collision, path_suffix_pairs
from collision_kit.engine.verify import first_diff, verify_collision

__all__ = [
    "DEFAULT_K",
    "IPC_SUFFIX_LEN",
    "REFERENCE_PAIR_A",
    "REFERENCE_PAIR_B",
    "BitString",
    "CollisionEngine",
    "CollisionReport",
    "CpcSide",
    "CpcSuffixBundle",
    "IpcSuffixPair",
    "KnownPairEngine",
    "NativeEngine",
    "PrefixContext",
    "birthday_cost",
    "birthday_search",
    "bundle_collides",
    "bundle_suffixes",
    "find_ipc_collision",
    "first_diff",
    "ingest_cpc_bundle",
    "padding_bits",
    "parse_cpc_bundle",
    "path_suffix_pairs",
    "serialize_cpc_bundle",
    "verify_birthday_pair",
    "verify_collision",
    "write_cpc_bundle",
]
