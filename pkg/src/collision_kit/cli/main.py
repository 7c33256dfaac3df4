"""``collision-kit`` command line: one subcommand group per toolkit area.

Tables go to stdout, tab-separated with a ``#`` header. Exit status is 0 on
success, 1 on a domain error or failed check and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from collections.abc import Iterator, Sequence
from pathlib import Path

from collision_kit.cli.demo import ENGINE_NATIVE, ENGINE_PUBLISHED, ENGINES, demo_end_to_end
from collision_kit.cli.models import GlobalConfig, resolve_seed
from collision_kit.exceptions import CollisionKitError, TrainingDataError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _seed(args: argparse.Namespace, config: GlobalConfig) -> int:
    seed = getattr(args, "command_seed", None)
    return seed if seed is not None else config.seed


def _emit(text: str) -> None:
    sys.stdout.write(text)


def _seed_line(seed: int) -> str:
    return f"# seed={seed}\n"


def _engine(name: str, budget: int | None, workers: int | None):
    from collision_kit.engine.base import KnownPairEngine, NativeEngine
    from collision_kit.engine.search import DEFAULT_BUDGET

    if name == ENGINE_PUBLISHED:
        return KnownPairEngine.published()
    return NativeEngine(budget or DEFAULT_BUDGET, workers)


def load_corpus(directory: Path | str) -> tuple[bytes, list[bytes]]:
    """Clean bytes from ``<dir>/clean/*`` and one suffix per file in ``<dir>/collision/*``.

    Raises:
        TrainingDataError: Either subdirectory is missing or empty.
    """
    directory = Path(directory)
    parts = {}
    for name in ("clean", "collision"):
        files = sorted(p for p in (directory / name).glob("*") if p.is_file())
        if not files:
            raise TrainingDataError(f"Corpus {directory} has no files in {name}/")
        parts[name] = [p.read_bytes() for p in files]
    return b"".join(parts["clean"]), parts["collision"]


# md5


def cmd_md5sum(args, config) -> int:
    from collision_kit.md5.core import file_digest

    for path in args.paths:
        try:
            value = file_digest(path, args.backend)
        except OSError as e:
            raise CollisionKitError(f"Reading {path} failed: {e}") from e
        _emit(f"{value.hex}  {path}\n")
    return EXIT_OK


# collide


def cmd_collide_ipc(args, config) -> int:
    from collision_kit.engine.models import PrefixContext
    from collision_kit.stealth.assemble import align_prefix
    from collision_kit.stealth.report import checksum_table

    prefix = align_prefix(Path(args.prefix).read_bytes())
    engine = _engine(args.engine, args.budget, args.workers)
    seed = _seed(args, config)
    pair = engine.find_ipc(PrefixContext.from_prefix(prefix), seed)
    files = [(config.out(args.out_a), prefix + pair.s_a), (config.out(args.out_b), prefix + pair.s_b)]
    for path, data in files:
        path.write_bytes(data)
    _emit(_seed_line(seed) + checksum_table([(str(path), data) for path, data in files]))
    return EXIT_OK


def cmd_collide_verify(args, config) -> int:
    from collision_kit.engine.verify import verify_collision

    report = verify_collision(args.a, args.b)
    diff = "-" if report.first_diff_offset is None else str(report.first_diff_offset)
    _emit(
        "# md5_a\tmd5_b\tsize_a\tsize_b\tfirst_diff\tmd5_equal\tsize_equal\n"
        f"{report.digest_a.hex}\t{report.digest_b.hex}\t{report.size_a}\t{report.size_b}"
        f"\t{diff}\t{report.md5_equal}\t{report.size_equal}\n"
    )
    return EXIT_OK if report.md5_equal and report.size_equal else EXIT_FAILURE


# stealth


def cmd_stealth_quantize(args, config) -> int:
    from collision_kit.stealth.text import trim_text
    from collision_kit.stealth.weights import parse_weights, quantize_weights

    data = Path(args.input).read_bytes()
    if args.text:
        outcome = trim_text(data, args.free)
    else:
        outcome = quantize_weights(parse_weights(data), args.free)
    config.out(args.output).write_bytes(outcome.new_file)
    _emit(
        "# size_in\tsize_out\tfreed\tspans\n"
        f"{len(data)}\t{len(outcome.new_file)}\t{outcome.bytes_freed}\t{len(outcome.manifest)}\n"
    )
    return EXIT_OK


def _write_pair(pair, args, config, seed: int) -> None:
    from collision_kit.stealth.manifest import write_manifest
    from collision_kit.stealth.report import table1_report

    out_a, out_b = config.out(args.out_a), config.out(args.out_b)
    out_a.write_bytes(pair.col_c)
    out_b.write_bytes(pair.col_p)
    write_manifest(pair.manifest, out_b.with_name(out_b.name + ".manifest"))
    _emit(_seed_line(seed) + table1_report(pair))


def cmd_stealth_ipc_demo(args, config) -> int:
    from collision_kit.stealth.assemble import assemble_ipc_demo

    engine = _engine(args.engine, args.budget, args.workers)
    seed = _seed(args, config)
    pair = assemble_ipc_demo(
        Path(args.payload).read_bytes(), engine, args.target_size, seed, args.fill
    )
    _write_pair(pair, args, config, seed)
    return EXIT_OK


def cmd_stealth_cpc(args, config) -> int:
    from collision_kit.engine.bundle import ingest_cpc_bundle
    from collision_kit.stealth.assemble import assemble_cpc

    seed = _seed(args, config)
    pair = assemble_cpc(
        Path(args.clean).read_bytes(),
        Path(args.poisoned).read_bytes(),
        ingest_cpc_bundle(args.bundle),
        args.target_size,
        seed,
        args.fill,
    )
    _write_pair(pair, args, config, seed)
    return EXIT_OK


def cmd_stealth_enhance(args, config) -> int:
    from collision_kit.engine.bundle import ingest_cpc_bundle
    from collision_kit.stealth.assemble import enhance_pair

    seed = _seed(args, config)
    pair = enhance_pair(
        Path(args.clean).read_bytes(),
        Path(args.poisoned).read_bytes(),
        ingest_cpc_bundle(args.bundle),
        args.free,
        args.fill,
        seed,
    )
    _write_pair(pair, args, config, seed)
    return EXIT_OK


def cmd_stealth_report(args, config) -> int:
    from collision_kit.stealth.report import checksum_table

    labels = args.labels.split(",")
    if len(labels) != 2:
        raise CollisionKitError(f"--labels needs two comma-separated names, got {args.labels!r}")
    _emit(checksum_table([(labels[0], Path(args.a).read_bytes()), (labels[1], Path(args.b).read_bytes())]))
    return EXIT_OK


# distribution


def cmd_serve(args, config) -> int:
    from collision_kit.distribution.routes import load_route_table
    from collision_kit.distribution.server import ServeLog, serve

    table = load_route_table(args.config)
    server = serve(table, args.bind, ServeLog(config.out(args.log) if args.log else None))
    _emit(f"# serving {server.url}\n")
    sys.stdout.flush()
    try:
        if args.duration:
            time.sleep(args.duration)
        else:
            while True:
                time.sleep(3600)
    except KeyboardInterrupt:
        logger.info("Interrupted, stopping server")
    finally:
        server.stop()
    for entry in server.log.entries:
        _emit(entry.to_line() + "\n")
    return EXIT_OK


def cmd_fetch(args, config) -> int:
    from collision_kit.distribution.client import client_fetch_verify
    from collision_kit.distribution.models import PASS

    report = client_fetch_verify(
        args.url,
        args.md5,
        timeout=args.timeout,
        dest=config.out(args.output) if args.output else None,
        source_address=args.source_address,
    )
    _emit(
        "# bytes\tcomputed\texpected\tverdict\tdiagnostic\n"
        f"{report.bytes_received}\t{report.computed.hex}\t{report.expected.hex}"
        f"\t{report.verdict}\t{report.diagnostic or '-'}\n"
    )
    return EXIT_OK if report.verdict == PASS else EXIT_FAILURE


# detect


def _training_config(args, config):
    from collision_kit.detector.models import TrainingConfig

    return TrainingConfig(
        epochs=args.epochs, learning_rate=args.learning_rate, seed=_seed(args, config)
    )


def cmd_detect_train(args, config) -> int:
    from collision_kit.detector.dataset import make_training_set
    from collision_kit.detector.model_io import save_model
    from collision_kit.detector.train import train

    seed = _seed(args, config)
    source, suffixes = load_corpus(args.corpus)
    samples = make_training_set(source, suffixes, seed=seed, count=args.count)
    model = train(args.kind, samples, _training_config(args, config))
    save_model(model, config.out(args.output))
    _emit(
        _seed_line(seed)
        + "# kind\tsamples\taccuracy\tfinal_loss\n"
        f"{model.kind}\t{len(samples)}\t{model.accuracy(samples):.4f}"
        f"\t{model.losses[-1] if model.losses else float('nan'):.6f}\n"
    )
    return EXIT_OK


def cmd_detect_scan(args, config) -> int:
    from collision_kit.detector.model_io import load_model
    from collision_kit.detector.scan import format_report, scan_file

    report = scan_file(
        Path(args.file).read_bytes(), load_model(args.model), args.tau, workers=args.workers
    )
    text = format_report(report)
    if args.output:
        config.out(args.output).write_text(text)
    _emit(text)
    return EXIT_OK


def cmd_detect_eval(args, config) -> int:
    from collision_kit.detector.dataset import parse_truth
    from collision_kit.detector.scan import evaluate, format_evaluation, parse_report

    report = parse_report(Path(args.report).read_text())
    baseline = parse_report(Path(args.baseline).read_text()) if args.baseline else None
    rows = evaluate(report, parse_truth(Path(args.truth).read_text()), baseline)
    _emit(format_evaluation(rows))
    return EXIT_OK


def cmd_detect_matrix(args, config) -> int:
    from collision_kit.detector.dataset import make_training_set, split_samples
    from collision_kit.detector.train import format_matrix, transfer_matrix

    seed = _seed(args, config)
    corpora = {}
    for directory in args.corpus:
        source, suffixes = load_corpus(directory)
        samples = make_training_set(source, suffixes, seed=seed, count=args.count)
        corpora[Path(directory).name] = split_samples(samples, args.test_fraction, seed)
    kinds = tuple(args.kinds.split(","))
    matrix = transfer_matrix(corpora, kinds, _training_config(args, config))
    _emit(_seed_line(seed) + format_matrix(matrix))
    return EXIT_OK


def cmd_detect_harness(args, config) -> int:
    from collision_kit.detector.dataset import format_truth, insert_regions

    regions = [Path(p).read_bytes() for p in args.collision]
    seed = _seed(args, config)
    data, truth = insert_regions(Path(args.clean).read_bytes(), regions, seed)
    config.out(args.output).write_bytes(data)
    config.out(args.truth).write_text(format_truth(truth))
    _emit(_seed_line(seed) + "# start\tend\n" + format_truth(truth))
    return EXIT_OK


# theory


def cmd_theory_birthday(args, config) -> int:
    from collision_kit.theory.birthday import monte_carlo, p_approx

    seed = _seed(args, config)
    result = monte_carlo(args.n, args.s, args.trials, seed, args.workers)
    _emit(
        _seed_line(seed)
        + "# n\ts\texact\tapprox\tmonte_carlo\tstderr\ttrials\n"
        f"{args.n}\t{args.s}\t{result.probability:.6f}\t{p_approx(args.n, args.s):.6f}"
        f"\t{result.estimate:.6f}\t{result.standard_error:.6f}\t{result.trials}\n"
    )
    return EXIT_OK


def cmd_theory_discrepancy(args, config) -> int:
    from collision_kit.theory.birthday import discrepancy_experiment
    from collision_kit.theory.models import BirthdayParams

    params = BirthdayParams(args.n, args.s, args.sa, args.sb, args.pa, 1.0 - args.pa)
    seed = _seed(args, config)
    result = discrepancy_experiment(params, trials=args.trials, seed=seed, workers=args.workers)
    lines = [f"# seed={seed}", "# event\tformula\tsimulated\tstderr"]
    for name, row in (("clean", result.clean), ("collision", result.collision), ("mixed", result.mixed)):
        lines.append(f"{name}\t{row.probability:.6f}\t{row.estimate:.6f}\t{row.standard_error:.6f}")
    ordering = "-" if result.ordering_holds is None else str(result.ordering_holds)
    lines.append(
        f"# in_regime={result.in_regime} ordering_holds={ordering} "
        f"mixed_raw={result.mixed_formula.raw:.6f} mixed_clamped={result.mixed_formula.clamped} "
        f"mixed_pairwise={result.mixed_pairwise:.6f}"
    )
    _emit("\n".join(lines) + "\n")
    return EXIT_OK if result.ordering_holds is not False else EXIT_FAILURE


def cmd_theory_js(args, config) -> int:
    from collision_kit.theory.convergence import format_curves, js_convergence, plot_convergence

    curves = js_convergence(
        Path(args.clean).read_bytes(),
        Path(args.collision).read_bytes(),
        args.window_tokens,
        args.samples,
        _seed(args, config),
    )
    if args.plot:
        plot_convergence(curves, config.out(args.plot))
    _emit(format_curves(curves, args.step))
    return EXIT_OK


# demo


def cmd_demo(args, config) -> int:
    summary = demo_end_to_end(config, tau=args.tau, engine=args.engine, budget=args.budget)
    _emit(summary.to_text())
    return EXIT_OK if summary.passed else EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    from collision_kit.detector.models import KINDS
    from collision_kit.distribution.client import DEFAULT_TIMEOUT
    from collision_kit.stealth.assemble import DEFAULT_MIN_FREED
    from collision_kit.stealth.models import FILL_POLICIES, FILL_RANDOM

    parser = argparse.ArgumentParser(
        prog="collision-kit",
        description="Size-preserving MD5 collisions, IP-conditioned delivery and their detection.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    parser.add_argument("-q", "--quiet", action="store_true", help="errors only")
    parser.add_argument(
        "--seed", type=int, help="default seed for randomized steps (drawn and printed when unset)"
    )
    parser.add_argument("--out-dir", type=Path, help="directory for relative output paths")
    commands = parser.add_subparsers(dest="command", required=True, metavar="command")

    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed", dest="command_seed", type=int, help="seed for this command")
    searching = argparse.ArgumentParser(add_help=False)
    searching.add_argument("--engine", choices=(ENGINE_NATIVE, ENGINE_PUBLISHED), default=ENGINE_NATIVE)
    searching.add_argument("--budget", type=int, help="compression-call budget for the native search")
    searching.add_argument("--workers", type=int, help="search processes")
    filled = argparse.ArgumentParser(add_help=False)
    filled.add_argument("--fill", choices=FILL_POLICIES, default=FILL_RANDOM, help="padding fill")
    learning = argparse.ArgumentParser(add_help=False)
    learning.add_argument("--epochs", type=int, default=5)
    learning.add_argument("--learning-rate", type=float, default=0.5)
    learning.add_argument("--count", type=int, help="samples per class")

    p = commands.add_parser("md5sum", help="print MD5 digests of files")
    p.add_argument("paths", nargs="+")
    p.add_argument("--backend", choices=("native", "hashlib"), help="digest implementation")
    p.set_defaults(handler=cmd_md5sum)

    collide = commands.add_parser("collide", help="identical-prefix collisions").add_subparsers(
        dest="action", required=True, metavar="action"
    )
    p = collide.add_parser("ipc", parents=[seeded, searching], help="find a two-block collision")
    p.add_argument("--prefix", required=True)
    p.add_argument("--out-a", required=True)
    p.add_argument("--out-b", required=True)
    p.set_defaults(handler=cmd_collide_ipc)
    p = collide.add_parser("verify", help="compare digests, sizes and first difference")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(handler=cmd_collide_verify)

    stealth = commands.add_parser("stealth", help="size-preserving collision files").add_subparsers(
        dest="action", required=True, metavar="action"
    )
    p = stealth.add_parser("quantize", help="free space in a weight or text file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--free", type=int, default=DEFAULT_MIN_FREED, help="bytes to free")
    p.add_argument("--text", action="store_true", help="treat input as UTF-8 text")
    p.set_defaults(handler=cmd_stealth_quantize)
    p = stealth.add_parser("ipc-demo", parents=[seeded, searching, filled], help="two files, one payload")
    p.add_argument("--payload", required=True)
    p.add_argument("--target-size", type=int, required=True)
    p.add_argument("--out-a", required=True)
    p.add_argument("--out-b", required=True)
    p.set_defaults(handler=cmd_stealth_ipc_demo)
    p = stealth.add_parser("cpc", parents=[seeded, filled], help="assemble from a chosen-prefix bundle")
    p.add_argument("--clean", required=True)
    p.add_argument("--poisoned", required=True)
    p.add_argument("--bundle", required=True)
    p.add_argument("--target-size", type=int, required=True)
    p.add_argument("--out-a", required=True)
    p.add_argument("--out-b", required=True)
    p.set_defaults(handler=cmd_stealth_cpc)
    p = stealth.add_parser("enhance", parents=[seeded, filled], help="quantize both, attach bundle, pad")
    p.add_argument("--clean", required=True)
    p.add_argument("--poisoned", required=True)
    p.add_argument("--bundle", required=True)
    p.add_argument("--free", type=int, default=DEFAULT_MIN_FREED, help="bytes to free per file")
    p.add_argument("--out-a", required=True)
    p.add_argument("--out-b", required=True)
    p.set_defaults(handler=cmd_stealth_enhance)
    p = stealth.add_parser("report", help="checksum and size table")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--labels", default="clean,poisoned", help="two comma-separated row labels")
    p.set_defaults(handler=cmd_stealth_report)

    p = commands.add_parser("serve", help="serve variants by client address")
    p.add_argument("--config", required=True, help="route config file")
    p.add_argument("--bind", default="127.0.0.1:8000", help="host:port")
    p.add_argument("--log", help="request log file")
    p.add_argument(
        "--duration", type=float, default=0.0, help="seconds to serve, 0 until interrupted"
    )
    p.set_defaults(handler=cmd_serve)

    p = commands.add_parser("fetch", help="download and check the MD5")
    p.add_argument("--url", required=True)
    p.add_argument("--md5", required=True)
    p.add_argument("--out", dest="output", help="save the body here")
    p.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT, help="seconds")
    p.add_argument("--source-address", help="local address to connect from")
    p.set_defaults(handler=cmd_fetch)

    detect = commands.add_parser("detect", help="collision-byte detection").add_subparsers(
        dest="action", required=True, metavar="action"
    )
    p = detect.add_parser("train", parents=[seeded, learning], help="train a window classifier")
    p.add_argument("--corpus", required=True, help="directory with clean/ and collision/")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--out", dest="output", required=True)
    p.set_defaults(handler=cmd_detect_train)
    p = detect.add_parser("scan", help="prefilter and classify a file")
    p.add_argument("--model", required=True)
    p.add_argument("--file", required=True)
    p.add_argument("--tau", type=float, default=0.0, help="similarity threshold; 1 disables the filter")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", dest="output", help="also write the report here")
    p.set_defaults(handler=cmd_detect_scan)
    p = detect.add_parser("eval", help="score a report against inserted regions")
    p.add_argument("--report", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--baseline", help="report of the same file scanned with --tau 1")
    p.set_defaults(handler=cmd_detect_eval)
    p = detect.add_parser("matrix", parents=[seeded, learning], help="cross-corpus accuracy table")
    p.add_argument("--corpus", action="append", required=True, help="corpus directory (repeatable)")
    p.add_argument("--kinds", default=",".join(KINDS))
    p.add_argument("--test-fraction", type=float, default=0.25)
    p.set_defaults(handler=cmd_detect_matrix)
    p = detect.add_parser("harness", parents=[seeded], help="plant collision bytes into a clean file")
    p.add_argument("--clean", required=True)
    p.add_argument("--collision", action="append", required=True, help="region file (repeatable)")
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--truth", required=True)
    p.set_defaults(handler=cmd_detect_harness)

    theory = commands.add_parser("theory", help="birthday-problem calculations").add_subparsers(
        dest="action", required=True, metavar="action"
    )
    p = theory.add_parser("birthday", parents=[seeded], help="exact, approximate and simulated")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(handler=cmd_theory_birthday)
    p = theory.add_parser("discrepancy", parents=[seeded], help="clean vs collision repeat rates")
    p.add_argument("--s", type=int, default=1 << 16)
    p.add_argument("--sa", type=int, required=True)
    p.add_argument("--sb", type=int, required=True)
    p.add_argument("--pa", type=float, required=True)
    p.add_argument("--n", type=int, default=128)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(handler=cmd_theory_discrepancy)
    p = theory.add_parser("js", parents=[seeded], help="running-mean similarity curves")
    p.add_argument("--clean", required=True)
    p.add_argument("--collision", required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--window-tokens", type=int, default=64)
    p.add_argument("--step", type=int, default=100, help="print every STEP samples")
    p.add_argument("--plot", help="also save a plot here (needs matplotlib)")
    p.set_defaults(handler=cmd_theory_js)

    p = commands.add_parser("demo", help="run the whole attack and defence on toy data")
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--engine", choices=ENGINES, default=ENGINE_PUBLISHED)
    p.add_argument("--budget", type=int, help="compression-call budget for --engine native")
    p.set_defaults(handler=cmd_demo)
    return parser


def iter_parsers(
    parser: argparse.ArgumentParser, name: str = ""
) -> Iterator[tuple[str, argparse.ArgumentParser]]:
    """Every parser and nested subparser with its command path."""
    yield name, parser
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for sub_name, sub in action.choices.items():
                yield from iter_parsers(sub, f"{name} {sub_name}".strip())


def _configure_logging(verbose: int, quiet: bool) -> None:
    level = logging.ERROR if quiet else max(logging.DEBUG, logging.WARNING - 10 * verbose)
    logging.basicConfig(
        level=level, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s", stream=sys.stderr
    )


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK

    _configure_logging(args.verbose, args.quiet)
    config = GlobalConfig(resolve_seed(args.seed), args.verbose - int(args.quiet), args.out_dir)
    if config.output_dir:
        config.output_dir.mkdir(parents=True, exist_ok=True)
    try:
        return args.handler(args, config)
    except (CollisionKitError, ImportError, OSError) as e:
        print(f"collision-kit: error: {e}", file=sys.stderr)
        return EXIT_FAILURE


def main() -> None:
    sys.exit(run())
