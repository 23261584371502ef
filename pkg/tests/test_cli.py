import json
import shutil

import pytest

from bibkit.cli import main

from conftest import FIXTURES

CORPUS = str(FIXTURES / "golden_corpus.jsonl")
SERVER = ["--server", "http://server.test"]


def run(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# -- usage errors --------------------------------------------------------------


def test_no_command_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 1


def test_unknown_command_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1


def test_missing_required_option_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["verify"])
    assert exc.value.code == 1


# -- lookup ---------------------------------------------------------------------


def test_lookup_doi_found(capsys):
    code, out, _ = run(
        ["lookup", "10.1111/iju.13054", "--fixtures", str(FIXTURES / "replay_doi_found.json")]
        + SERVER,
        capsys,
    )
    assert code == 0
    assert out.startswith("@article{yamashita2016,")
    assert "10.1111/iju.13054" in out


def test_lookup_title_mismatch_status(capsys):
    code, out, _ = run(
        ["lookup", "alpha beta gamma delta", "--fixtures", str(FIXTURES / "replay_title_mismatch.json")]
        + SERVER,
        capsys,
    )
    assert code == 0
    assert out.strip() == "title_mismatch"


def test_lookup_empty_query_exits_1(capsys):
    code, _, err = run(
        ["lookup", "   ", "--fixtures", str(FIXTURES / "replay_doi_found.json")] + SERVER,
        capsys,
    )
    assert code == 1
    assert "empty query" in err


def test_lookup_upstream_unavailable_exits_3(tmp_path, capsys):
    empty = tmp_path / "empty.json"
    empty.write_text(json.dumps({"format_version": 1, "exchanges": []}), "utf-8")
    code, _, err = run(
        ["lookup", "10.1111/iju.13054", "--fixtures", str(empty)] + SERVER, capsys
    )
    assert code == 3
    assert "upstream unavailable" in err


def test_lookup_fixtures_directory_merges_files(tmp_path, capsys):
    for name in ("replay_doi_found.json", "replay_title_mismatch.json"):
        shutil.copy(FIXTURES / name, tmp_path / name)
    code, out, _ = run(
        ["lookup", "10.1111/iju.13054", "--fixtures", str(tmp_path)] + SERVER, capsys
    )
    assert code == 0
    assert out.startswith("@article{yamashita2016,")


# -- verify -----------------------------------------------------------------------


def test_verify_prints_report(capsys):
    code, out, _ = run(["verify", "--corpus", CORPUS], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["aggregate"]["entries"] == 20
    assert "labels" not in report


def test_verify_writes_bundle(tmp_path, capsys):
    out_dir = tmp_path / "bundle"
    code, out, _ = run(["verify", "--corpus", CORPUS, "--out", str(out_dir)], capsys)
    assert code == 0
    assert (out_dir / "report.json").is_file()
    assert (out_dir / "labels.tsv").is_file()


def test_verify_bad_corpus_exits_2(tmp_path, capsys):
    bad = tmp_path / "corpus.jsonl"
    bad.write_text('{"format_version": 7}\n', "utf-8")
    code, _, err = run(["verify", "--corpus", str(bad)], capsys)
    assert code == 2
    assert "corpus error" in err


def test_verify_permissive_skips_bad_records(tmp_path, capsys):
    lines = (FIXTURES / "golden_corpus.jsonl").read_text("utf-8").splitlines()
    lines.insert(2, "{broken json")
    bad = tmp_path / "corpus.jsonl"
    bad.write_text("\n".join(lines) + "\n", "utf-8")
    code, out, _ = run(["verify", "--corpus", str(bad), "--permissive"], capsys)
    assert code == 0
    assert json.loads(out)["aggregate"]["entries"] == 20


# -- reconcile ----------------------------------------------------------------------


def write_reconcile_inputs(tmp_path):
    bib = tmp_path / "refs.bib"
    bib.write_text("@article{mine, title={Some Working Title}, year={2015}}\n", "utf-8")
    meta = tmp_path / "meta.tsv"
    meta.write_text("format_version\t1\np1\t\t10.1111/iju.13054\t\n", "utf-8")
    return bib, meta


def test_reconcile_merges_and_logs(tmp_path, capsys):
    bib, meta = write_reconcile_inputs(tmp_path)
    out = tmp_path / "revised.bib"
    log = tmp_path / "actions.tsv"
    code, stdout, _ = run(
        [
            "reconcile",
            "--bib", str(bib),
            "--meta", str(meta),
            "--out", str(out),
            "--log", str(log),
            "--fixtures", str(FIXTURES / "replay_doi_found.json"),
        ]
        + SERVER,
        capsys,
    )
    assert code == 0
    revised = out.read_text("utf-8")
    assert revised.startswith("@article{mine,")  # baseline key kept
    assert "10.1111/iju.13054" in revised
    log_lines = log.read_text("utf-8").splitlines()
    assert log_lines[0] == "format_version\t1"
    assert log_lines[1].split("\t")[:3] == ["p1", "mine", "merged"]


def test_reconcile_count_mismatch_exits_2(tmp_path, capsys):
    bib, _ = write_reconcile_inputs(tmp_path)
    meta = tmp_path / "meta2.tsv"
    meta.write_text("format_version\t1\np1\t\t\tT1\np2\t\t\tT2\n", "utf-8")
    code, _, err = run(["reconcile", "--bib", str(bib), "--meta", str(meta)], capsys)
    assert code == 2
    assert "1 entries but 2 metadata lines" in err


def test_reconcile_bad_meta_header_exits_2(tmp_path, capsys):
    bib, _ = write_reconcile_inputs(tmp_path)
    meta = tmp_path / "meta3.tsv"
    meta.write_text("paper_id\turl\n", "utf-8")
    code, _, err = run(["reconcile", "--bib", str(bib), "--meta", str(meta)], capsys)
    assert code == 2
    assert "input error" in err


def test_reconcile_unparseable_bib_exits_2(tmp_path, capsys):
    _, meta = write_reconcile_inputs(tmp_path)
    bib = tmp_path / "broken.bib"
    bib.write_text("@article{broken, title={A}\n", "utf-8")
    code, _, err = run(["reconcile", "--bib", str(bib), "--meta", str(meta)], capsys)
    assert code == 2
    assert "input error" in err


# -- bench -------------------------------------------------------------------------


def test_bench_verify_mode_bundles_are_byte_identical(tmp_path, capsys):
    for name in ("a", "b"):
        code, _, _ = run(
            ["bench", "--corpus", CORPUS, "--mode", "verify", "--out", str(tmp_path / name)],
            capsys,
        )
        assert code == 0
    for file in ("report.json", "labels.tsv"):
        assert (tmp_path / "a" / file).read_bytes() == (tmp_path / "b" / file).read_bytes()


def test_bench_prints_report_without_out(capsys):
    code, out, _ = run(["bench", "--corpus", CORPUS], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["mode"] == "verify"
    assert "labels" not in report


def test_bench_invalid_mode_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["bench", "--corpus", CORPUS, "--mode", "sideways"])
    assert exc.value.code == 1


# -- report ------------------------------------------------------------------------


def test_report_recomputes_aggregates_from_labels(tmp_path, capsys):
    out_dir = tmp_path / "bundle"
    run(["verify", "--corpus", CORPUS, "--out", str(out_dir)], capsys)
    code, out, _ = run(["report", "--labels", str(out_dir / "labels.tsv")], capsys)
    assert code == 0
    report = json.loads(out)
    golden = json.loads((FIXTURES / "golden_aggregate.json").read_text("utf-8"))["aggregate"]
    assert report["overall"] == golden["overall"]
    assert report["per_field"] == golden["per_field"]
    assert report["fully_correct"] == golden["fully_correct"]


def test_report_bad_labels_file_exits_2(tmp_path, capsys):
    bad = tmp_path / "labels.tsv"
    bad.write_text("no header here\n", "utf-8")
    code, _, err = run(["report", "--labels", str(bad)], capsys)
    assert code == 2
    assert "input error" in err
