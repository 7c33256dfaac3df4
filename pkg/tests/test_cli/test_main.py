"""Tests for the collision-kit command line."""

import re

import pytest

from collision_kit.cli.main import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, build_parser, iter_parsers, run
from collision_kit.cli.models import resolve_seed
from collision_kit.engine.search import path_suffix_pairs
from collision_kit.md5 import digest
from collision_kit.stealth.weights import make_toy_weights


@pytest.fixture
def corpus(tmp_path):
    root = tmp_path / "corpus"
    (root / "clean").mkdir(parents=True)
    (root / "collision").mkdir()
    (root / "clean" / "weights.twc").write_bytes(make_toy_weights([40_000], seed=0))
    for i, (suffix, _) in enumerate(path_suffix_pairs(20, seed=1)):
        (root / "collision" / f"suffix{i:02d}.bin").write_bytes(suffix)
    return root


def test_no_arguments_is_usage_error(capsys):
    assert run([]) == EXIT_USAGE
    assert "usage:" in capsys.readouterr().err


def test_unknown_subcommand_is_usage_error(capsys):
    assert run(["frobnicate"]) == EXIT_USAGE
    assert "invalid choice" in capsys.readouterr().err


def test_missing_action_is_usage_error():
    assert run(["detect"]) == EXIT_USAGE


def test_help_exits_zero(capsys):
    assert run(["--help"]) == EXIT_OK
    assert "demo" in capsys.readouterr().out


def test_help_lists_every_flag():
    for name, parser in iter_parsers(build_parser()):
        text = parser.format_help()
        for action in parser._actions:
            for flag in action.option_strings:
                assert flag in text, f"{flag} missing from help of {name or 'collision-kit'}"


def test_md5sum(tmp_path, capsys):
    path = tmp_path / "abc.txt"
    path.write_bytes(b"abc")
    assert run(["md5sum", str(path)]) == EXIT_OK
    assert capsys.readouterr().out == f"900150983cd24fb0d6963f7d28e17f72  {path}\n"


def test_md5sum_missing_file_is_domain_error(tmp_path, capsys):
    assert run(["md5sum", str(tmp_path / "nope")]) == EXIT_FAILURE
    assert "error" in capsys.readouterr().err


def test_collide_verify_exit_codes(tmp_path, published_pair, capsys):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    a.write_bytes(published_pair[0])
    b.write_bytes(published_pair[1])
    c.write_bytes(published_pair[1][:-1] + b"\x00")
    assert run(["collide", "verify", str(a), str(b)]) == EXIT_OK
    assert "\tTrue\tTrue" in capsys.readouterr().out
    assert run(["collide", "verify", str(a), str(c)]) == EXIT_FAILURE


def test_collide_ipc_with_published_pair(tmp_path, capsys):
    prefix = tmp_path / "empty"
    prefix.write_bytes(b"")
    code = run([
        "--out-dir", str(tmp_path / "out"), "--seed", "5",
        "collide", "ipc", "--engine", "published", "--prefix", str(prefix),
        "--out-a", "a.bin", "--out-b", "b.bin",
    ])
    assert code == EXIT_OK
    a = (tmp_path / "out" / "a.bin").read_bytes()
    b = (tmp_path / "out" / "b.bin").read_bytes()
    assert a != b and digest(a) == digest(b)
    assert capsys.readouterr().out.startswith("# seed=5\n# label\tmd5\tsize\n")


def test_collide_ipc_unknown_prefix_fails(tmp_path):
    prefix = tmp_path / "prefix"
    prefix.write_bytes(b"x" * 64)
    args = ["collide", "ipc", "--engine", "published", "--prefix", str(prefix)]
    assert run(args + ["--out-a", str(tmp_path / "a"), "--out-b", str(tmp_path / "b")]) == EXIT_FAILURE


def test_stealth_quantize(tmp_path, capsys):
    src, out = tmp_path / "w.twc", tmp_path / "q.twc"
    src.write_bytes(make_toy_weights([5000], seed=0))
    assert run(["stealth", "quantize", "--in", str(src), "--out", str(out), "--free", "1536"]) == EXIT_OK
    header, row = capsys.readouterr().out.splitlines()
    assert header == "# size_in\tsize_out\tfreed\tspans"
    assert row.split("\t")[2:] == ["1536", "1"]
    assert src.stat().st_size - out.stat().st_size == 1536 - 9


def test_stealth_quantize_text(tmp_path):
    src, out = tmp_path / "t.txt", tmp_path / "t.out"
    src.write_text("the   quick  brown   fox " * 50)
    assert run(["stealth", "quantize", "--text", "--in", str(src), "--out", str(out), "--free", "100"]) == 0
    assert len(out.read_bytes()) <= len(src.read_bytes()) - 100


def test_stealth_quantize_reports_capacity_error(tmp_path, capsys):
    src = tmp_path / "w.twc"
    src.write_bytes(make_toy_weights([10], seed=0))
    args = ["stealth", "quantize", "--in", str(src), "--out", str(tmp_path / "q"), "--free", "4096"]
    assert run(args) == EXIT_FAILURE
    assert "f32 elements" in capsys.readouterr().err


def test_stealth_ipc_demo_and_report(tmp_path, capsys):
    payload = tmp_path / "payload"
    payload.write_bytes(b"")
    a, b = tmp_path / "a.bin", tmp_path / "b.bin"
    code = run([
        "stealth", "ipc-demo", "--engine", "published", "--payload", str(payload),
        "--target-size", "1000", "--out-a", str(a), "--out-b", str(b), "--seed", "3",
    ])
    assert code == EXIT_OK
    assert a.stat().st_size == b.stat().st_size == 1000
    assert digest(a.read_bytes()) == digest(b.read_bytes())
    assert "seed=3" in (tmp_path / "b.bin.manifest").read_text()
    assert capsys.readouterr().out.startswith("# seed=3\n# label\tmd5\tsize\n")

    assert run(["stealth", "report", "--a", str(a), "--b", str(b)]) == EXIT_OK
    rows = [line.split("\t") for line in capsys.readouterr().out.splitlines()[1:]]
    assert [r[0] for r in rows] == ["clean", "poisoned"]
    assert rows[0][1:] == rows[1][1:]


def test_stealth_report_rejects_bad_labels(tmp_path):
    path = tmp_path / "f"
    path.write_bytes(b"x")
    assert run(["stealth", "report", "--a", str(path), "--b", str(path), "--labels", "one"]) == 1


def test_detect_train_scan_eval(tmp_path, corpus, capsys):
    model = tmp_path / "bayes.cdm"
    train = ["detect", "train", "--corpus", str(corpus), "--kind", "bayes", "--seed", "4"]
    assert run(train + ["--out", str(model)]) == EXIT_OK
    assert capsys.readouterr().out.startswith("# seed=4\n# kind\tsamples\taccuracy\tfinal_loss\nbayes\t")

    clean = tmp_path / "clean.twc"
    clean.write_bytes(make_toy_weights([20_000], seed=5))
    region = tmp_path / "region.bin"
    region.write_bytes(b"".join(a for a, _ in path_suffix_pairs(5, seed=2))[:600])
    harness, truth = tmp_path / "harness.bin", tmp_path / "truth.tsv"
    code = run([
        "detect", "harness", "--clean", str(clean), "--collision", str(region),
        "--out", str(harness), "--truth", str(truth),
    ])
    assert code == EXIT_OK
    assert harness.stat().st_size == clean.stat().st_size + 600
    capsys.readouterr()

    report, baseline = tmp_path / "report.tsv", tmp_path / "baseline.tsv"
    scan = ["detect", "scan", "--model", str(model), "--file", str(harness)]
    assert run(scan + ["--out", str(report)]) == EXIT_OK
    assert run(scan + ["--tau", "1", "--out", str(baseline)]) == EXIT_OK
    assert "# windows=" in report.read_text()
    capsys.readouterr()

    code = run([
        "detect", "eval", "--report", str(report), "--truth", str(truth), "--baseline", str(baseline),
    ])
    assert code == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("# mode\tsamples\tprecision")
    assert [line.split("\t")[0] for line in lines[1:]] == ["with-js", "without-js"]


def test_detect_train_missing_corpus(tmp_path, capsys):
    args = ["detect", "train", "--corpus", str(tmp_path), "--kind", "bayes", "--out", "m"]
    assert run(args) == EXIT_FAILURE
    assert "no files in clean/" in capsys.readouterr().err


def test_detect_matrix(corpus, capsys):
    args = ["detect", "matrix", "--corpus", str(corpus), "--kinds", "bayes", "--count", "100"]
    assert run(["--seed", "9"] + args) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[:2] == ["# seed=9", "# kind\ttrain\tcorpus"]
    assert lines[2].startswith("bayes\tcorpus\t")


def test_theory_birthday(capsys):
    args = ["theory", "birthday", "--n", "23", "--s", "365", "--trials", "20000", "--seed", "2"]
    assert run(args) == EXIT_OK
    seed_line, header, row = capsys.readouterr().out.splitlines()
    assert seed_line == "# seed=2"
    fields = dict(zip(header[2:].split("\t"), row.split("\t")))
    assert float(fields["exact"]) == pytest.approx(0.5073, abs=1e-4)
    assert abs(float(fields["monte_carlo"]) - 0.5073) < 0.02


def test_theory_discrepancy(capsys):
    args = ["theory", "discrepancy", "--sa", "256", "--sb", "65280", "--pa", "0.99", "--trials", "500"]
    assert run(["--seed", "11"] + args) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("# seed=11\n# event\tformula\tsimulated\tstderr\n")
    assert "in_regime=True ordering_holds=True" in out
    assert "mixed_clamped=True" in out


def test_theory_discrepancy_invalid_params(capsys):
    args = ["theory", "discrepancy", "--sa", "1000", "--sb", "10", "--pa", "0.5"]
    assert run(args) == EXIT_FAILURE
    assert "s_a <= s_b" in capsys.readouterr().err


def test_theory_js(tmp_path, capsys):
    clean, coll = tmp_path / "clean", tmp_path / "coll"
    clean.write_bytes(make_toy_weights([10_000], seed=0))
    coll.write_bytes(b"".join(a for a, _ in path_suffix_pairs(128, seed=0)))
    args = ["theory", "js", "--clean", str(clean), "--collision", str(coll), "--samples", "300"]
    assert run(args) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[1] == "# samples\tclean_clean\tcollision_collision\tclean_collision"
    assert len(lines) == 5


def test_serve_for_fixed_duration(tmp_path, published_pair, capsys):
    (tmp_path / "clean.bin").write_bytes(published_pair[0])
    (tmp_path / "poisoned.bin").write_bytes(published_pair[1])
    config = tmp_path / "routes.conf"
    config.write_text(
        f"md5 = {digest(published_pair[0]).hex}\ndefault = clean.bin\n127.0.0.2 = poisoned.bin\n"
    )
    args = ["serve", "--config", str(config), "--bind", "127.0.0.1:0", "--duration", "0.1"]
    assert run(args) == EXIT_OK
    assert capsys.readouterr().out.startswith("# serving http://127.0.0.1:")


def test_serve_rejects_mismatched_variants(tmp_path, published_pair):
    (tmp_path / "clean.bin").write_bytes(published_pair[0])
    (tmp_path / "other.bin").write_bytes(b"other")
    config = tmp_path / "routes.conf"
    config.write_text(
        f"md5 = {digest(published_pair[0]).hex}\ndefault = clean.bin\n10.0.0.1 = other.bin\n"
    )
    assert run(["serve", "--config", str(config), "--duration", "0.1"]) == EXIT_FAILURE


def test_fetch_against_running_server(tmp_path, published_pair, capsys):
    pytest.importorskip("httpx")
    from collision_kit.distribution.routes import parse_route_config
    from collision_kit.distribution.server import serve

    (tmp_path / "clean.bin").write_bytes(published_pair[0])
    md5 = digest(published_pair[0]).hex
    table = parse_route_config(f"md5 = {md5}\ndefault = clean.bin\n", tmp_path)
    with serve(table) as server:
        assert run(["fetch", "--url", server.url, "--md5", md5]) == EXIT_OK
        assert "\tpass\t" in capsys.readouterr().out
        assert run(["fetch", "--url", server.url, "--md5", "0" * 32]) == EXIT_FAILURE


def test_seed_drawn_and_printed_when_unset(monkeypatch, capsys):
    monkeypatch.delenv("COLLISION_KIT_SEED", raising=False)
    args = ["theory", "birthday", "--n", "23", "--s", "365", "--trials", "100"]
    assert run(args) == EXIT_OK
    first = capsys.readouterr().out.splitlines()[0]
    assert re.fullmatch(r"# seed=\d+", first)


def test_seed_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("COLLISION_KIT_SEED", "77")
    assert run(["theory", "birthday", "--n", "23", "--s", "365", "--trials", "100"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("# seed=77\n")


def test_printed_seed_reproduces_run(monkeypatch, capsys):
    monkeypatch.delenv("COLLISION_KIT_SEED", raising=False)
    args = ["theory", "birthday", "--n", "30", "--s", "365", "--trials", "2000"]
    assert run(args) == EXIT_OK
    first = capsys.readouterr().out
    seed = first.splitlines()[0].removeprefix("# seed=")
    assert run(["--seed", seed] + args) == EXIT_OK
    assert capsys.readouterr().out == first


def test_subcommand_seed_overrides_global(capsys):
    args = ["theory", "birthday", "--n", "23", "--s", "365", "--trials", "100", "--seed", "3"]
    assert run(["--seed", "8"] + args) == EXIT_OK
    assert capsys.readouterr().out.startswith("# seed=3\n")


def test_resolve_seed(monkeypatch):
    monkeypatch.setenv("COLLISION_KIT_SEED", "12")
    assert resolve_seed(4) == 4
    assert resolve_seed() == 12
    monkeypatch.delenv("COLLISION_KIT_SEED")
    assert 0 <= resolve_seed() < 2**32
