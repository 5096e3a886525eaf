import csv
import json
import subprocess
import sys

import pytest

from fsconflict.cli import ConfigError, main, read_config

# a short world keeps the end-to-end commands quick
SMALL = ["--n-years", "4", "--synth-seed", "1"]


def run(*argv):
    return main([str(a) for a in argv])


def _rows(path):
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


@pytest.fixture(scope="module")
def world(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli") / "world"
    assert run("synth", "--out", d, *SMALL) == 0
    return d


@pytest.fixture(scope="module")
def fused_dir(world, tmp_path_factory):
    out = tmp_path_factory.mktemp("cli") / "run"
    assert run("fuse", "--data-dir", world, "--out", out) == 0
    return out


def test_synth_outputs_and_determinism(world, tmp_path, capsys):
    assert (world / "admin.shp").is_file() and (world / "acled.csv").is_file()
    assert len(list((world / "fs").glob("cs_*.shp"))) == 12
    again = tmp_path / "again"
    assert run("synth", "--out", again, *SMALL) == 0
    for p in sorted(world.rglob("*")):
        if p.is_file():
            assert (again / p.relative_to(world)).read_bytes() == p.read_bytes(), p.name
    assert capsys.readouterr().out == ""


def test_synth_invalid_output_path(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert run("synth", "--out", blocker / "sub", *SMALL) == 1
    err = capsys.readouterr().err
    assert "event=failed" in err and "command=synth" in err


def test_fuse_row_count_matches_truth(world, fused_dir):
    truth = json.loads((world / "truth.json").read_text(encoding="utf-8"))
    rows = _rows(fused_dir / "fused.csv")
    assert len(rows) == truth["expected_fused_rows"] == 36 * 11
    quality = _rows(fused_dir / "join_quality.csv")
    assert [q["match_rate"] for q in quality] == ["1.000000"] * 3


def test_fuse_sliver_zero_identical_on_exact_tiling(tmp_path):
    exact = tmp_path / "exact"
    assert run("synth", "--out", exact, *SMALL, "--fs-jitter", 0) == 0
    assert run("fuse", "--data-dir", exact, "--out", tmp_path / "a") == 0
    assert run("fuse", "--data-dir", exact, "--out", tmp_path / "b", "--sliver-threshold", 0) == 0
    assert (tmp_path / "a" / "fused.csv").read_bytes() == (tmp_path / "b" / "fused.csv").read_bytes()


def test_fuse_sliver_zero_keeps_jitter_slivers(world, fused_dir, tmp_path):
    # the default world is jittered on purpose; without the filter the
    # slivers from neighbouring FS polygons raise worst phases
    assert run("fuse", "--data-dir", world, "--out", tmp_path, "--sliver-threshold", 0) == 0
    loose, strict = _rows(tmp_path / "fused.csv"), _rows(fused_dir / "fused.csv")
    assert len(loose) == len(strict)
    assert all(int(a["phase"]) >= int(b["phase"]) for a, b in zip(loose, strict))
    assert any(a["phase"] != b["phase"] for a, b in zip(loose, strict))


def test_fuse_missing_fs_dir(world, tmp_path, capsys):
    code = run("fuse", "--admin", world / "admin.shp", "--conflicts", world / "acled.csv",
               "--fs-dir", tmp_path / "nope", "--out", tmp_path / "o")
    assert code != 0
    assert "FileNotFoundError" in capsys.readouterr().err


def test_bad_flag_values(world, tmp_path):
    assert run("fuse", "--data-dir", world, "--out", tmp_path, "--sliver-threshold", -1) == 1
    assert run("fuse", "--data-dir", world, "--out", tmp_path, "--lag-months", 0) == 1
    assert run("train-eval", "--out", tmp_path, "--models", "svm") == 1


def test_correlate_outputs(world, fused_dir, tmp_path):
    out = tmp_path / "c"
    out.mkdir()
    assert run("correlate", "--fused", fused_dir / "fused.csv", "--data-dir", world, "--out", out) == 0
    assert sorted(p.name for p in out.iterdir()) == sorted(
        f"correlations_{lv}.{ext}" for lv in ("country", "region", "district") for ext in ("csv", "geojson"))
    truth = json.loads((world / "truth.json").read_text(encoding="utf-8"))
    hot = {d["key"] for d in truth["districts"] if d["hot"]}
    sig = {r["unit_key"] for r in _rows(out / "correlations_district.csv") if float(r["rho"]) > 0}
    assert hot & sig
    gj = json.loads((out / "correlations_district.geojson").read_text(encoding="utf-8"))
    assert all(f["geometry"]["type"] == "MultiPolygon" for f in gj["features"])


def test_correlate_alpha_one_keeps_defined(fused_dir, tmp_path):
    from fsconflict.fuse import read_fused_csv
    from fsconflict.stats import Undefined, aggregate_level, spearman

    assert run("correlate", "--fused", fused_dir / "fused.csv", "--out", tmp_path, "--alpha", 1.0) == 0
    defined = 0
    for pair in aggregate_level(read_fused_csv(fused_dir / "fused.csv"), "district").values():
        try:
            spearman(pair)
            defined += len(pair) >= 3
        except Undefined:
            pass
    assert len(_rows(tmp_path / "correlations_district.csv")) == defined
    gj = json.loads((tmp_path / "correlations_country.geojson").read_text(encoding="utf-8"))
    assert all(f["geometry"] is None for f in gj["features"])


def _train(fused_dir, out, *extra):
    return run("train-eval", "--fused", fused_dir / "fused.csv", "--out", out, "--n-trees", 25, *extra)


def test_train_eval_rows_and_determinism(fused_dir, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert _train(fused_dir, a) == 0 and _train(fused_dir, b) == 0
    rows = _rows(a / "metrics.csv")
    assert len(rows) == 7
    assert [r["Type"] for r in rows] == ["Rule-based"] * 3 + ["ML-based"] * 4
    assert all(r["Test Recall"] == r["Test Accuracy"] for r in rows)
    for name in ("metrics.csv", "importance.csv", "manifest.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    man = json.loads((a / "manifest.json").read_text(encoding="utf-8"))
    extra = set(man["features"]["conflict"]) - set(man["features"]["CHS"])
    assert extra == {"lag3_conflicts", "lag3_fatalities", "cum24_conflicts", "cum24_fatalities"}
    assert set(man["features"]["CHS"]) < set(man["features"]["conflict"])


def test_config_file_and_override(fused_dir, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"# settings\nfused = {fused_dir / 'fused.csv'}\nn_trees = 5\nmodels = forest\ncutoff = 201906\n",
                   encoding="utf-8")
    out = tmp_path / "o"
    assert run("train-eval", "--config", cfg, "--out", out, "--n-trees", 7) == 0
    man = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert man["n_trees"] == 7 and man["models"] == ["forest"] and man["split_cutoff"] == "201906"
    assert len(_rows(out / "metrics.csv")) == 5
    bad = tmp_path / "bad.cfg"
    bad.write_text("bogus_key = 1\n", encoding="utf-8")
    assert run("train-eval", "--config", bad, "--out", out) == 1


def test_read_config_errors(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("alpha = 0.1  # trailing comment\n\nlag-months=2\n", encoding="utf-8")
    assert read_config(p) == {"alpha": "0.1", "lag_months": "2"}
    p.write_text("no equals sign\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        read_config(p)


def test_report_indexes_every_stage(world, tmp_path):
    out = tmp_path / "r"
    assert run("report", "--data-dir", world, "--out", out, "--n-trees", 10) == 0
    index = json.loads((out / "index.json").read_text(encoding="utf-8"))
    assert set(index["stages"]) == {"fuse", "correlate", "train-eval"}
    for name, meta in index["files"].items():
        assert (out / name).stat().st_size == meta["bytes"]


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "fsconflict.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for cmd in ("synth", "fuse", "correlate", "train-eval", "report"):
        assert cmd in res.stdout
