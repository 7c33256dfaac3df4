"""End-to-end run: build a colliding pair, serve it by client address, verify, detect."""

from __future__ import annotations

import logging
import tempfile
from collections.abc import Callable
from contextlib import ExitStack
from dataclasses import replace
from pathlib import Path
from typing import Any

from collision_kit.cli.models import DemoSummary, GlobalConfig, StageResult
from collision_kit.detector.dataset import make_training_set
from collision_kit.detector.scan import scan_file
from collision_kit.detector.train import train
from collision_kit.distribution.models import PASS
from collision_kit.distribution.routes import parse_route_config
from collision_kit.distribution.server import ServeLog, serve
from collision_kit.engine.base import KnownPairEngine, NativeEngine
from collision_kit.engine.models import IPC_SUFFIX_LEN
from collision_kit.engine.search import DEFAULT_BUDGET, path_suffix_pairs
from collision_kit.exceptions import CollisionKitError
from collision_kit.md5.core import digest_stream
from collision_kit.stealth.assemble import DEFAULT_MIN_FREED, assemble_ipc_demo, make_fill
from collision_kit.stealth.manifest import write_manifest
from collision_kit.stealth.models import FILL_RANDOM, StealthPair
from collision_kit.stealth.weights import make_toy_weights, parse_weights, quantize_weights

logger = logging.getLogger(__name__)

ENGINE_PUBLISHED = "published"
ENGINE_NATIVE = "native"
ENGINES = (ENGINE_PUBLISHED, ENGINE_NATIVE)

DEMO_TENSORS = [20_000, 40_000]
TRAIN_TENSORS = [300_000]
TRAIN_SAMPLES = 2000

NORMAL_IP = "127.0.0.1"
TARGET_IP = "127.0.0.2"


def _run_stage(summary: DemoSummary, name: str, fn: Callable[[], tuple[bool, str, Any]]) -> Any:
    try:
        passed, detail, value = fn()
    except CollisionKitError as e:
        raise CollisionKitError(f"Stage {name} failed: {e}") from e
    summary.stages.append(StageResult(name, passed, detail))
    log = logger.info if passed else logger.warning
    log(f"Stage {name}: {'pass' if passed else 'fail'} ({detail})")
    return value


def _leading_pair(compressed: bytes, target_size: int, seed: int) -> StealthPair:
    """The published pair first, then fill, then the compressed content.

    The stored pair only collides from the initial chaining value, so it has
    to open the file.
    """
    lead = assemble_ipc_demo(b"", KnownPairEngine.published(), IPC_SUFFIX_LEN, seed)
    fill = make_fill(target_size - IPC_SUFFIX_LEN - len(compressed), FILL_RANDOM, seed)
    col_c = lead.col_c + fill + compressed
    col_p = lead.col_p + fill + compressed
    manifest = replace(
        lead.manifest,
        original_size=target_size,
        digest=digest_stream([col_c], backend="hashlib").hex,
        pad_length=len(fill),
    )
    return StealthPair(col_c, col_p, manifest)


def _detector_model(seed: int):
    """Bayes model trained on a second toy file with engine-sampled suffixes as collision material."""
    source = make_toy_weights(TRAIN_TENSORS, seed + 1)
    material = [s_a for s_a, _ in path_suffix_pairs(TRAIN_SAMPLES, seed + 2)]
    samples = make_training_set(source, material, seed=seed, count=TRAIN_SAMPLES)
    return train("bayes", samples)


def demo_end_to_end(
    config: GlobalConfig,
    tau: float = 0.0,
    engine: str = ENGINE_PUBLISHED,
    budget: int = DEFAULT_BUDGET,
) -> DemoSummary:
    """Run every stage in order and report pass/fail per stage.

    ``engine="published"`` reuses the stored 2004 pair at the start of the
    file; ``"native"`` searches a fresh pair after the compressed content and
    can take a long time.

    Raises:
        CollisionKitError: A stage raised; the message names the stage.
    """
    if engine not in ENGINES:
        raise CollisionKitError(f"Unknown demo engine {engine!r}, expected one of {ENGINES}")
    seed = config.seed
    summary = DemoSummary(seed)

    with ExitStack() as stack:
        if config.output_dir:
            workdir = Path(config.output_dir)
            workdir.mkdir(parents=True, exist_ok=True)
        else:
            workdir = Path(stack.enter_context(tempfile.TemporaryDirectory(prefix="ck-demo-")))

        def generate():
            weights = make_toy_weights(DEMO_TENSORS, seed)
            return True, f"{len(weights)} bytes", weights

        clean = _run_stage(summary, "toy-weights", generate)

        def quantize():
            outcome = quantize_weights(parse_weights(clean), DEFAULT_MIN_FREED)
            return (
                outcome.bytes_freed >= DEFAULT_MIN_FREED,
                f"freed {outcome.bytes_freed} bytes",
                outcome.new_file,
            )

        compressed = _run_stage(summary, "quantize", quantize)

        def collide():
            if engine == ENGINE_NATIVE:
                pair = assemble_ipc_demo(compressed, NativeEngine(budget), len(clean), seed)
            else:
                pair = _leading_pair(compressed, len(clean), seed)
            (workdir / "clean.bin").write_bytes(pair.col_c)
            (workdir / "poisoned.bin").write_bytes(pair.col_p)
            write_manifest(pair.manifest, workdir / "poisoned.bin.manifest")
            same = digest_stream([pair.col_c], "hashlib") == digest_stream([pair.col_p], "hashlib")
            passed = same and len(pair.col_c) == len(pair.col_p) == len(clean)
            passed = passed and pair.col_c != pair.col_p
            return passed, f"md5 {pair.manifest.digest} size {len(pair.col_c)}", pair

        pair = _run_stage(summary, "ipc-demo", collide)

        def start_server():
            table = parse_route_config(
                f"md5 = {pair.manifest.digest}\n"
                "default = clean.bin\n"
                f"{TARGET_IP} = poisoned.bin\n",
                workdir,
            )
            server = serve(table, f"{NORMAL_IP}:0", ServeLog(workdir / "serve.log"))
            stack.callback(server.stop)
            return True, f"{len(table.variants)} variants", server

        server = _run_stage(summary, "serve", start_server)

        from collision_kit.distribution.client import client_fetch_verify

        def fetch(label: str, ip: str, expected: bytes):
            def run():
                dest = workdir / f"fetched-{label}.bin"
                report = client_fetch_verify(
                    server.url, pair.manifest.digest, dest=dest, source_address=ip
                )
                got = dest.read_bytes() if dest.exists() else b""
                variant = "poisoned" if got == pair.col_p else "clean" if got == pair.col_c else "other"
                return (
                    report.verdict == PASS and got == expected,
                    f"md5 {report.verdict}, received {variant}",
                    report,
                )

            return run

        _run_stage(summary, "client-normal", fetch("normal", NORMAL_IP, pair.col_c))
        _run_stage(summary, "client-target", fetch("target", TARGET_IP, pair.col_p))

        def detect():
            report = scan_file(pair.col_p, _detector_model(seed), tau)
            start = pair.manifest.collision_offset
            end = start + IPC_SUFFIX_LEN
            hit = any(f_start < end and start < f_end for f_start, f_end in report.flagged)
            return (
                hit,
                f"{report.candidate_count}/{report.windows_total} candidates, "
                f"{len(report.flagged)} flagged regions, tau={tau}",
                report,
            )

        _run_stage(summary, "detect-scan", detect)

    return summary
