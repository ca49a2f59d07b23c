import filecmp
import json
import shutil
from pathlib import Path

import pytest

from eventlens import cli, pipeline, synth

BUNDLE = synth.bundled_dir()
CONFIG = str(BUNDLE / "config.json")


def run_cli(*args):
    return cli.main(list(args))


def report_files(out):
    return sorted(p.relative_to(out).as_posix() for p in (out / "report").rglob("*") if p.is_file())


@pytest.fixture(scope="module")
def full_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("full")
    assert run_cli("run", "--config", CONFIG, "--out", str(out)) == 0
    return out


def test_bundled_files_match_generator(tmp_path):
    synth.write_bundle(tmp_path)
    for name in ("corpus.jsonl", "followers_a.txt", "followers_b.txt", "bot_scores.csv",
                 "categories.csv", "streams.json", "annotations.csv", "config.json"):
        assert (tmp_path / name).read_bytes() == (BUNDLE / name).read_bytes(), name


def test_ingest_only(tmp_path, capsys):
    assert run_cli("run", "--config", CONFIG, "--out", str(tmp_path), "--phases", "ingest") == 0
    cache = sorted(p.name for p in (tmp_path / "cache").iterdir())
    assert cache == ["corpus.jsonl", "ingest.json"]
    meta = json.loads((tmp_path / "cache" / "ingest.json").read_text())
    assert meta["rejected"] == 2 and meta["duplicates_removed"] == 12
    assert not (tmp_path / "report").exists()
    summary = json.loads(capsys.readouterr().out)
    assert summary["completed"] == ["ingest"]


def test_fit_without_network(tmp_path, capsys):
    assert run_cli("ingest", "--config", CONFIG, "--out", str(tmp_path)) == 0
    assert run_cli("fit", "--config", CONFIG, "--out", str(tmp_path)) == 1
    err = capsys.readouterr().err
    assert "network" in err and "network.json" in err


def test_bad_configs_exit_2(tmp_path, capsys):
    cfg = json.loads(Path(CONFIG).read_text())
    cfg.update(inputs=["missing.jsonl"], seed=-1, lang="fr")
    cfg["tailfit"]["n_sims"] = 10
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(cfg))
    assert run_cli("run", "--config", str(p)) == 2
    err = capsys.readouterr().err
    for field in ("inputs[0]", "seed", "lang", "tailfit.n_sims"):
        assert f"config error: {field}" in err
    assert run_cli("run", "--config", str(tmp_path / "nope.json")) == 2
    assert run_cli("run", "--config", CONFIG, "--phases", "ingest,dance") == 2


def test_offline_forbids_http(tmp_path, capsys):
    cfg = json.loads(Path(CONFIG).read_text())
    cfg["bots"] = {"provider": "http", "url": "http://scores.invalid"}
    cfg["inputs"] = [str(BUNDLE / "corpus.jsonl")]
    for k in ("categories", "streams", "annotations"):
        cfg[k] = str(BUNDLE / cfg[k])
    cfg["followers"] = {k: str(BUNDLE / v) for k, v in cfg["followers"].items()}
    p = tmp_path / "http.json"
    p.write_text(json.dumps(cfg))
    assert pipeline.load_config(p).bots["provider"] == "http"
    assert run_cli("bots", "--config", str(p), "--offline") == 2
    assert "offline" in capsys.readouterr().err


def test_seed_is_materialised(tmp_path):
    cfg = pipeline.load_config(CONFIG, {"out": str(tmp_path), "seed": 11})
    snap = cfg.snapshot()
    assert snap["seed"] == 11 and snap["tailfit"]["seed"] == 11 and "out" not in snap


def test_full_run_report(full_run):
    index = json.loads((full_run / "report" / "index.json").read_text())
    assert sorted(index["sections"]) == sorted(pipeline.REPORT_SECTIONS)
    assert (full_run / "config_snapshot.json").exists()
    snap = json.loads((full_run / "config_snapshot.json").read_text())
    assert index["config"] == snap


def test_phase_cache_soundness(full_run, tmp_path):
    out = tmp_path / "partial"
    shutil.copytree(full_run / "cache", out / "cache")
    (out / "cache" / "fit.json").unlink()
    assert run_cli("fit", "--config", CONFIG, "--out", str(out)) == 0
    assert run_cli("report", "--config", CONFIG, "--out", str(out)) == 0
    assert report_files(out) == report_files(full_run)
    for f in report_files(out):
        assert filecmp.cmp(out / f, full_run / f, shallow=False), f


def test_ego_subcommand(full_run, capsys):
    assert run_cli("ego", "#vdb", "--config", CONFIG, "--out", str(full_run), "--filter") == 0
    out = json.loads(capsys.readouterr().out)
    assert out["ego"] == "#vdb" and out["vertices"] >= 2
    assert set(out["shares"]) == {"Supporting", "Against", "General", "ImportantTopics"}
    assert run_cli("ego", "#doesnotexist", "--config", CONFIG, "--out", str(full_run)) == 1


def test_failed_phase_is_marked(tmp_path, monkeypatch):
    cfg = pipeline.load_config(CONFIG, {"out": str(tmp_path)})
    assert pipeline.run(cfg, ["ingest"]).status == 0

    def boom(cfg, cache):
        raise RuntimeError("disk on fire")
    monkeypatch.setitem(pipeline.PHASE_FUNCS, "streams", boom)
    res = pipeline.run(cfg, ["streams", "report"])
    assert res.status == 1 and res.failed == "streams" and "disk on fire" in res.message
    assert (tmp_path / "cache" / "streams.failed").exists()
    assert (tmp_path / "cache" / "ingest.json").exists()
