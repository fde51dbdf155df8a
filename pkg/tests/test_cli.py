import csv
import json

import numpy as np
import pytest

from stablesurf.cli import main
from stablesurf.config import PRESETS, serialize
from stablesurf.image import write_pgm
from stablesurf.io import read_descriptors, read_points
from stablesurf.synthetic import synthetic_sequence, write_sequence


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    images, hs = synthetic_sequence(seed=7, size=128, count=3)
    write_sequence(root / "seq", images, hs)
    return root


def run(*args):
    return main([str(a) for a in args])


def test_detect_describe(workspace, tmp_path, capsys):
    img = workspace / "seq" / "img1.pgm"
    assert run("detect", img, "--config", "fast", "--out", tmp_path / "p.txt") == 0
    pts = read_points(tmp_path / "p.txt")
    assert len(pts) > 10
    assert run("describe", img, tmp_path / "p.txt", "--config", "stable", "--out", tmp_path / "d.txt") == 0
    feats = read_descriptors(tmp_path / "d.txt")
    out = capsys.readouterr().out
    dropped = int(out.split("dropped ")[1].split()[0]) + int(out.split("zero, ")[1].split()[0])
    assert len(feats) + dropped == len(pts)


def test_constant_image_gives_empty_files(tmp_path):
    write_pgm(tmp_path / "flat.pgm", np.full((64, 64), 128.0))
    assert run("detect", tmp_path / "flat.pgm", "--out", tmp_path / "p.txt") == 0
    assert (tmp_path / "p.txt").read_text() == "0\n"
    assert run("describe", tmp_path / "flat.pgm", tmp_path / "p.txt", "--out", tmp_path / "d.txt") == 0
    assert (tmp_path / "d.txt").read_text() == "0 64\n"


def test_config_file(workspace, tmp_path):
    cfg = tmp_path / "mine.cfg"
    cfg.write_text(serialize(PRESETS["fast"]()).replace("name = fast", "name = mine")
                   .replace("detector.max_features = 2000", "detector.max_features = 7"))
    assert run("detect", workspace / "seq" / "img1.pgm", "--config", cfg, "--out", tmp_path / "p.txt") == 0
    assert len(read_points(tmp_path / "p.txt")) == 7


def test_input_errors(tmp_path, capsys):
    assert run("detect", tmp_path / "missing.pgm", "--out", tmp_path / "p.txt") == 1
    write_pgm(tmp_path / "a.pgm", np.zeros((32, 32)))
    (tmp_path / "bad.txt").write_text("1\n1 2\n")
    assert run("describe", tmp_path / "a.pgm", tmp_path / "bad.txt", "--out", tmp_path / "d.txt") == 1
    assert "bad.txt:2" in capsys.readouterr().err
    assert run("detect", tmp_path / "a.pgm", "--config", "nosuch", "--out", tmp_path / "p.txt") == 1
    assert run("evaluate", tmp_path, "--config", "fast") == 1


def test_missing_homography_listed(workspace, tmp_path, capsys):
    for name in ("img1.pgm", "img2.pgm", "img3.pgm"):
        (tmp_path / name).write_bytes((workspace / "seq" / name).read_bytes())
    assert run("evaluate", tmp_path) == 1
    err = capsys.readouterr().err
    assert "H1to2p" in err and "H1to3p" in err


def test_evaluate_csv(workspace, tmp_path):
    out = tmp_path / "r.csv"
    assert run("evaluate", workspace / "seq", "--config", "fast", "--config", "stable", "--out", out) == 0
    rows = list(csv.DictReader(out.open()))
    per = [r for r in rows if r["image"] != "summary"]
    summary = [r for r in rows if r["image"] == "summary"]
    assert len(per) == 4 and {r["metric"] for r in per} == {"correct_fraction"}
    assert sorted(r["variant"] for r in summary) == ["fast", "stable"]
    assert max(float(r["value"]) for r in summary) == 1.0
    meta = json.loads((tmp_path / "r.csv.meta.json").read_text())
    assert meta["points_source"] == "reference-detector" and meta["reference_detector"]["max_features"] == 2000


def test_evaluate_detector_identity(tmp_path):
    images, _ = synthetic_sequence(seed=1, size=128, count=2)
    write_sequence(tmp_path / "same", [images[0]] * 3, [np.eye(3)] * 3)
    out = tmp_path / "r.csv"
    assert run("evaluate", tmp_path / "same", "--config", "fast", "--mode", "detector", "--out", out) == 0
    rows = list(csv.DictReader(out.open()))
    assert [float(r["value"]) for r in rows] == [1.0, 1.0, 1.0]


def test_evaluate_with_points_dir(workspace, tmp_path):
    pts_dir = tmp_path / "pts"
    pts_dir.mkdir()
    for i in (1, 2, 3):
        assert run("detect", workspace / "seq" / f"img{i}.pgm", "--out", pts_dir / f"img{i}.pts") == 0
    out = tmp_path / "r.csv"
    assert run("evaluate", workspace / "seq", "--config", "stable", "--points", pts_dir, "--out", out) == 0
    assert json.loads((tmp_path / "r.csv.meta.json").read_text())["points_source"] == "points-files"


def test_metric_domain_exit_code(tmp_path):
    flat = np.full((64, 64), 10.0)
    write_sequence(tmp_path / "flat", [flat, flat], [np.eye(3), np.eye(3)])
    assert run("evaluate", tmp_path / "flat", "--config", "fast", "--mode", "detector") == 2


def test_bench_small(tmp_path, capsys):
    write_pgm(tmp_path / "s.pgm", np.random.default_rng(0).integers(0, 255, (32, 32)))
    assert run("bench", tmp_path / "s.pgm", "--outer", "3", "--inner", "2") == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "variant,image,median_ms,best_of_inner_ms,feature_count"
    assert [ln.split(",")[0] for ln in lines[1:]] == ["fast", "stable"]
    assert all(float(ln.split(",")[2]) > 0 for ln in lines[1:])


def test_synth(tmp_path):
    assert run("synth", tmp_path / "a", "--seed", "5", "--size", "64", "--count", "2") == 0
    assert run("synth", tmp_path / "b", "--seed", "5", "--size", "64", "--count", "2") == 0
    for name in ("img1.pgm", "img2.pgm", "H1to2p"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
