"""Command-line driver: subcommands, determinism, and exit codes."""

from __future__ import annotations

import json
import subprocess
import sys
import time

import httpx
import pytest

from cqaguard.cli import main
from cqaguard.errors import InternalInvariantError
from cqaguard.logistic import read_model
from cqaguard.replay import read_replay_report
from cqaguard.sessions import load_corpus


def run(*args):
    return main([str(a) for a in args])


@pytest.fixture(scope="module")
def corpus_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "corpus.jsonl"
    assert run("gen", "--out", path, "--total", 500, "--campaign", 215,
               "--seed", 3) == 0
    return path


# ---------------------------------------------------------------------- gen

def test_gen_writes_valid_labeled_corpus(corpus_file):
    corpus = load_corpus(corpus_file)
    assert len(corpus) == 500
    assert sum(1 for s in corpus if s.label == 1) == 215


def test_gen_is_byte_deterministic(tmp_path, corpus_file):
    other = tmp_path / "again.jsonl"
    assert run("gen", "--out", other, "--total", 500, "--campaign", 215,
               "--seed", 3) == 0
    assert other.read_bytes() == corpus_file.read_bytes()


def test_gen_default_campaign_count_scales(tmp_path):
    out = tmp_path / "c.jsonl"
    assert run("gen", "--out", out, "--total", 1000) == 0
    corpus = load_corpus(out)
    assert sum(1 for s in corpus if s.label == 1) == round(1000 * 2147 / 4998)


def test_gen_rejects_bad_counts(tmp_path, capsys):
    assert run("gen", "--out", tmp_path / "x", "--total", 10,
               "--campaign", 20) == 2
    assert "error" in capsys.readouterr().err


# -------------------------------------------------------------------- train

def test_train_writes_readable_model(tmp_path, corpus_file):
    out = tmp_path / "model.txt"
    assert run("train", "--corpus", corpus_file, "--out", out) == 0
    model = read_model(out)
    assert model.version == 1
    assert model.trained_count == 500


def test_train_missing_corpus_is_data_error(tmp_path, capsys):
    assert run("train", "--corpus", tmp_path / "nope.jsonl",
               "--out", tmp_path / "m.txt") == 2


def test_train_single_class_is_data_error(tmp_path, capsys):
    single = tmp_path / "single.jsonl"
    assert run("gen", "--out", single, "--total", 50, "--campaign", 50) == 0
    assert run("train", "--corpus", single, "--out", tmp_path / "m.txt") == 2


# ------------------------------------------------------------------- replay

def test_replay_adaptive_report(tmp_path, corpus_file):
    out = tmp_path / "replay.tsv"
    assert run("replay", "--corpus", corpus_file, "--out", out,
               "--seed-size", 150, "--batch-size", 150) == 0
    reports = read_replay_report(out)
    assert [r.test_size for r in reports] == [150, 150, 50]
    assert [r.training_size for r in reports] == [150, 300, 450]


def test_replay_fixed_flag(tmp_path, corpus_file):
    out = tmp_path / "fixed.tsv"
    assert run("replay", "--corpus", corpus_file, "--out", out, "--fixed",
               "--seed-size", 150, "--batch-size", 150) == 0
    reports = read_replay_report(out)
    assert len({r.theta_snapshot for r in reports}) == 1


def test_replay_too_small_corpus_is_data_error(tmp_path, corpus_file):
    assert run("replay", "--corpus", corpus_file, "--out", tmp_path / "r.tsv",
               "--seed-size", 500, "--batch-size", 100) == 2


# -------------------------------------------------------------------- score

def test_score_to_file_and_stdout(tmp_path, corpus_file, capsys):
    model = tmp_path / "model.txt"
    assert run("train", "--corpus", corpus_file, "--out", model) == 0
    out = tmp_path / "scores.tsv"
    assert run("score", "--model", model, "--state", corpus_file,
               "--input", corpus_file, "--out", out) == 0
    capsys.readouterr()
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "url\tscore\tlabel"
    assert len(lines) == 501
    url, score, label = lines[1].split("\t")
    assert 0.0 <= float(score) <= 1.0 and label in ("0", "1")

    assert run("score", "--model", model, "--state", corpus_file,
               "--input", corpus_file) == 0
    stdout = capsys.readouterr().out
    assert stdout.splitlines()[0] == "url\tscore\tlabel"
    assert stdout.splitlines()[1] == lines[1]


# --------------------------------------------------------------------- diag

def test_diag_writes_tables(tmp_path, corpus_file, capsys):
    out_dir = tmp_path / "diag"
    assert run("diag", "--corpus", corpus_file, "--out-dir", out_dir) == 0
    assert (out_dir / "cdf.tsv").exists()
    verdicts = (out_dir / "verdicts.tsv").read_text(encoding="utf-8").splitlines()
    assert verdicts[0] == "feature\tks_statistic\tverdict"
    assert len(verdicts) == 4
    assert all(line.endswith("non-separating") for line in verdicts[1:])


# ------------------------------------------------------------ export-report

def test_export_report_tables(tmp_path, corpus_file):
    report = tmp_path / "replay.tsv"
    assert run("replay", "--corpus", corpus_file, "--out", report,
               "--seed-size", 150, "--batch-size", 150) == 0
    out_dir = tmp_path / "exports"
    assert run("export-report", "--report", report, "--out-dir", out_dir,
               "--corpus", corpus_file, "--train-size", 350) == 0
    metrics = (out_dir / "metrics_over_time.tsv").read_text("utf-8").splitlines()
    assert metrics[0].startswith("iteration\ttraining_size")
    assert len(metrics) == 4
    thetas = (out_dir / "theta_over_time.tsv").read_text("utf-8").splitlines()
    assert thetas[0] == "iteration\ttheta_0\ttheta_1\ttheta_2\ttheta_3"
    roc = (out_dir / "roc.tsv").read_text("utf-8").splitlines()
    assert roc[0] == "threshold\tfpr\ttpr"
    assert len(roc) == 10


def test_export_report_without_corpus_skips_roc(tmp_path, corpus_file):
    report = tmp_path / "replay.tsv"
    assert run("replay", "--corpus", corpus_file, "--out", report,
               "--seed-size", 150, "--batch-size", 150) == 0
    out_dir = tmp_path / "exports2"
    assert run("export-report", "--report", report, "--out-dir", out_dir) == 0
    assert not (out_dir / "roc.tsv").exists()


# --------------------------------------------------------------- exit codes

def test_usage_errors_exit_1(capsys):
    assert run() == 1
    assert run("not-a-command") == 1
    assert run("gen") == 1  # missing required --out
    assert run("serve", "--config", "c", "--listen", "nocolon") in (1, 2)
    capsys.readouterr()


def test_help_exits_0(capsys):
    assert run("--help") == 0
    assert "export-report" in capsys.readouterr().out


def test_internal_errors_exit_3(monkeypatch, tmp_path, corpus_file, capsys):
    import cqaguard.cli as cli_mod

    def boom(*args, **kwargs):
        raise InternalInvariantError("synthetic failure")

    monkeypatch.setattr(cli_mod, "replay", boom)
    assert run("replay", "--corpus", corpus_file,
               "--out", tmp_path / "r.tsv") == 3
    assert "internal error" in capsys.readouterr().err


def test_unexpected_exception_exits_3(monkeypatch, tmp_path, corpus_file, capsys):
    import cqaguard.cli as cli_mod
    monkeypatch.setattr(cli_mod, "train", lambda *a, **k: 1 / 0)
    assert run("train", "--corpus", corpus_file,
               "--out", tmp_path / "m.txt") == 3
    capsys.readouterr()


# -------------------------------------------------------------------- serve

def test_serve_subprocess_end_to_end(tmp_path, corpus_file):
    (tmp_path / "tokens.txt").write_text("adm admin\n", encoding="utf-8")
    (tmp_path / "server.conf").write_text(
        "tokens_file=tokens.txt\nretrain_every=50\nport=0\n", encoding="utf-8"
    )
    proc = subprocess.Popen(
        [sys.executable, "-m", "cqaguard.cli", "serve",
         "--config", str(tmp_path / "server.conf"),
         "--corpus", str(corpus_file)],
        stdout=subprocess.PIPE, stderr=subprocess.STDOUT, text=True,
    )
    try:
        line = proc.stdout.readline().strip()
        assert line.startswith("serving on http://")
        base = line.split()[-1]
        deadline = time.time() + 10
        health = None
        while time.time() < deadline:
            try:
                health = httpx.get(f"{base}/health", timeout=2).json()
                break
            except httpx.TransportError:
                time.sleep(0.1)
        assert health == {"model_version": 1, "sessions": 500, "status": "ok"}
        r = httpx.post(f"{base}/admin/rescore", json={"token": "adm"})
        assert r.status_code == 200
    finally:
        proc.terminate()
        proc.wait(timeout=10)
